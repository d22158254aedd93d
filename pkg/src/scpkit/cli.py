"""Command-line front end.

Usage::

    scpkit <check|complete|translate|relations|obstruct|hypo> --input FILE \
        [--format json|text] [--depth N] [--out FILE]

Instances are JSON objects with a ``kind`` field.  Every number is an exact
rational written as an integer or a ``"p/q"`` string.  Exit codes depend on
the report status only: 0 solved/feasible, 1 definitive negative, 2 input
problem or out-of-scope data, 3 internal consistency failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field, fields
from fractions import Fraction
from typing import Any, Mapping, Optional, Sequence

from .errors import (ConsistencyError, NoCompletion, NotSingular, ParseError, ScpError,
                     UnsupportedDegree, ValidationError)
from .exactla import Mat, QuadExt, as_rat, is_psd, rank
from .moments2d import (MomentSeq2, column_relations, hyponormality_matrix, localizing_matrix,
                        moment_matrix, monomial_basis, translate)
from .scp1d import WeightSeq1, scc_check, scc_complete
from .scp2d import (AffineForm, CompletionResult, QuadraticData, flat_obstruction_check,
                    hyponormality_window, quadratic_scp, singular_m2)
from .shifts import AtomicMeasure1, WeightFamily2

COMMANDS = ("check", "complete", "translate", "relations", "obstruct", "hypo")
KINDS = ("scp2d-quadratic", "scp2d-family", "scp1d", "moments", "obstruction")

EXIT_CODES = {
    "Solved": 0, "Feasible": 0, "FlatFeasible": 0, "Computed": 0,
    "NoCompletion": 1, "Obstructed": 1, "Infeasible": 1,
    "InputError": 2, "Unsupported": 2, "NotSingular": 2,
    "InternalError": 3,
}

_FIELDS = {
    "scp2d-quadratic": {"a", "b", "c", "d", "e"},
    "scp2d-family": {"alpha_sq", "beta_sq"},
    "scp1d": {"alpha_sq"},
    "moments": {"moments"},
    "obstruction": {"moments"},
}
_COMMON = {"kind", "depth", "translate"}


@dataclass(frozen=True)
class Instance:
    kind: str
    payload: Any
    depth: int = 6
    translate: Optional[tuple[Fraction, Fraction]] = None


# -- parsing -----------------------------------------------------------------

def _rat(value, where: str) -> Fraction:
    if isinstance(value, float):
        raise ParseError(f"{where}: floating-point literal {value!r}; write it as \"p/q\"")
    try:
        return as_rat(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"{where}: not an exact rational: {value!r}") from exc


def _weight_table(raw, where: str) -> dict[tuple[int, int], Fraction]:
    if not isinstance(raw, dict):
        raise ParseError(f"{where}: expected an object keyed by \"k1,k2\"")
    out = {}
    for key, value in raw.items():
        try:
            k1, k2 = (int(part) for part in key.split(","))
        except ValueError as exc:
            raise ParseError(f"{where}: bad index {key!r}, expected \"k1,k2\"") from exc
        out[(k1, k2)] = _rat(value, f"{where}[{key}]")
    return out


def _moment_rows(raw, where: str) -> MomentSeq2:
    if not isinstance(raw, list) or not all(isinstance(row, list) for row in raw):
        raise ParseError(f"{where}: expected a list of rows by degree")
    rows = [[_rat(v, f"{where}[{d}][{i}]") for i, v in enumerate(row)]
            for d, row in enumerate(raw)]
    try:
        return MomentSeq2.from_rows(rows)
    except ValueError as exc:
        raise ValidationError(f"{where}: {exc}") from exc


def parse_instance(text: bytes | str) -> Instance:
    """Validate a JSON instance; numbers become Fractions."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not UTF-8: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ParseError("instance must be a JSON object")
    kind = raw.get("kind")
    if kind not in KINDS:
        raise ParseError(f"field 'kind': expected one of {', '.join(KINDS)}, got {kind!r}")
    allowed = _FIELDS[kind] | _COMMON
    unknown = sorted(set(raw) - allowed)
    if unknown:
        raise ParseError(f"unknown field(s) for kind {kind}: {', '.join(unknown)}")
    missing = sorted(_FIELDS[kind] - set(raw))
    if missing:
        raise ParseError(f"missing field(s) for kind {kind}: {', '.join(missing)}")

    depth = raw.get("depth", 6)
    if isinstance(depth, bool) or not isinstance(depth, int) or depth < 2:
        raise ValidationError("field 'depth': expected an integer >= 2")
    shift = None
    if "translate" in raw:
        pair = raw["translate"]
        if not isinstance(pair, list) or len(pair) != 2:
            raise ParseError("field 'translate': expected [h, k]")
        shift = (_rat(pair[0], "translate[0]"), _rat(pair[1], "translate[1]"))

    try:
        if kind == "scp2d-quadratic":
            payload = QuadraticData(*(_rat(raw[n], f"field '{n}'") for n in "abcde"))
        elif kind == "scp2d-family":
            alpha = _weight_table(raw["alpha_sq"], "alpha_sq")
            beta = _weight_table(raw["beta_sq"], "beta_sq")
            m = max(k1 + k2 for k1, k2 in alpha) if alpha else -1
            payload = WeightFamily2(m, alpha, beta)
        elif kind == "scp1d":
            if not isinstance(raw["alpha_sq"], list):
                raise ParseError("field 'alpha_sq': expected a list")
            payload = WeightSeq1(tuple(_rat(v, f"alpha_sq[{i}]")
                                       for i, v in enumerate(raw["alpha_sq"])))
        else:
            payload = _moment_rows(raw["moments"], "moments")
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    return Instance(kind, payload, depth, shift)


# -- reports -----------------------------------------------------------------

def rat_str(v: Fraction) -> str:
    v = Fraction(v)
    return f"{v.numerator}/{v.denominator}"


def num_json(v) -> Any:
    """Rationals as "num/den", surds as {"p", "q", "radicand"}."""
    v = QuadExt.coerce(v)
    if v.is_rational:
        return rat_str(v.p)
    return {"p": rat_str(v.p), "q": rat_str(v.q), "radicand": rat_str(v.radicand)}


def _mat_json(m: Mat) -> list[list[str]]:
    return [[rat_str(x) for x in row] for row in m.tolist()]


def measure_json(mu) -> list[dict[str, Any]]:
    if isinstance(mu, AtomicMeasure1):
        return [{"t": num_json(t), "density": num_json(r)}
                for t, r in zip(mu.atoms, mu.densities)]
    return [{"x": num_json(x), "y": num_json(y), "density": num_json(r)}
            for (x, y), r in zip(mu.atoms, mu.densities)]


@dataclass(frozen=True)
class Report:
    status: str
    command: str = ""
    kind: str = ""
    case: str = ""
    rank: Optional[int] = None
    new_weights: Mapping[str, str] = field(default_factory=dict)
    measure: Sequence[Mapping[str, Any]] = ()
    matrices: Mapping[str, Any] = field(default_factory=dict)
    checks: Mapping[str, bool] = field(default_factory=dict)
    witness: Optional[Sequence[str]] = None
    relations: Sequence[str] = ()
    moments: Sequence[Sequence[str]] = ()
    message: str = ""

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def to_dict(self) -> dict[str, Any]:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None or (value in ("", (), {}) and f.name != "status"):
                continue
            if isinstance(value, tuple):
                value = [list(v) if isinstance(v, tuple) else v for v in value]
            out[f.name] = value
        return out

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "Report":
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ParseError(f"unknown report field(s): {', '.join(sorted(unknown))}")
        kw = dict(raw)
        for name in ("measure", "relations", "moments", "witness"):
            if kw.get(name) is not None:
                kw[name] = tuple(tuple(v) if isinstance(v, list) else v for v in kw[name])
        return cls(**kw)

    @classmethod
    def from_json(cls, text: bytes | str) -> "Report":
        return cls.from_dict(json.loads(text))


def _weights_json(res: CompletionResult) -> dict[str, str]:
    return {"p": rat_str(res.p), "q": rat_str(res.q), "r": rat_str(res.r), "s": rat_str(res.s)}


def _affine_json(form) -> dict[str, str]:
    return {"const": rat_str(form.const), **{n: rat_str(v) for n, v in form.coeffs}}


def _affine_text(raw: Mapping[str, str]) -> str:
    return str(AffineForm(Fraction(raw["const"]), tuple(
        sorted((n, Fraction(v)) for n, v in raw.items() if n != "const"))))


def _completion_report(command: str, kind: str, res: CompletionResult) -> Report:
    extras = {name: rat_str(getattr(res, name)) for name in ("z", "y0", "yc")
              if getattr(res, name) is not None}
    return Report(
        "Solved", command, kind, res.case_tag, res.rank_m1,
        new_weights={**_weights_json(res), **extras},
        measure=tuple(measure_json(res.measure)),
        matrices={"m2": _mat_json(res.m2.mat), "mx": _mat_json(res.mx.mat),
                  "my": _mat_json(res.my.mat)},
        checks=dict(res.checks),
        relations=tuple(str(rel) for rel in column_relations(res.m2)))


def _complete2(inst: Instance) -> CompletionResult:
    data = inst.payload
    if inst.kind == "scp2d-family":
        if data.m == 1:
            data = QuadraticData.from_family(data)
        elif data.m == 2:
            return singular_m2(data, inst.depth)
        else:
            raise UnsupportedDegree(f"weight families with m = {data.m} are out of scope")
    return quadratic_scp(data, inst.depth)


def _moments(inst: Instance) -> MomentSeq2:
    seq = inst.payload
    if inst.translate is not None:
        seq = translate(seq, *inst.translate)
    return seq


def _localizers_psd(seq: MomentSeq2) -> dict[str, bool]:
    checks = {"psd_m": is_psd(moment_matrix(seq, seq.degree // 2).mat)}
    if seq.degree >= 1:
        n = (seq.degree - 1) // 2
        checks["psd_mx"] = is_psd(localizing_matrix(seq, n, "x").mat)
        checks["psd_my"] = is_psd(localizing_matrix(seq, n, "y").mat)
    return checks


def _rows_json(seq: MomentSeq2) -> tuple[tuple[str, ...], ...]:
    return tuple(tuple(rat_str(v) for v in row) for row in seq.rows())


def _run(command: str, inst: Instance) -> Report:
    kind = inst.kind
    two_d = kind in ("scp2d-quadratic", "scp2d-family")
    moment_kinds = kind in ("moments", "obstruction")

    if command == "check":
        if kind == "scp1d":
            v = scc_check(inst.payload)
            checks = {"psd_hk": v.psd_hk, "psd_hx": v.psd_hx, "range": v.range_ok}
            return Report("Feasible" if v.admits_completion else "NoCompletion", command, kind,
                          checks=checks)
        if two_d:
            res = _complete2(inst)
            return Report("Feasible", command, kind, res.case_tag, res.rank_m1,
                          checks=dict(res.checks))
        seq = _moments(inst)
        checks = _localizers_psd(seq)
        return Report("Feasible" if all(checks.values()) else "Infeasible", command, kind,
                      rank=rank(moment_matrix(seq, seq.degree // 2).mat), checks=checks)

    if command == "complete":
        if kind == "scp1d":
            mu = scc_complete(inst.payload)
            return Report("Solved", command, kind, case=f"m{inst.payload.m}",
                          rank=len(mu.atoms), measure=tuple(measure_json(mu)))
        if two_d:
            return _completion_report(command, kind, _complete2(inst))
        raise UnsupportedDegree("complete needs weight data, not a moment table")

    if command == "translate":
        if not moment_kinds:
            raise UnsupportedDegree("translate acts on moment tables")
        if inst.translate is None:
            raise ValidationError("translate needs the 'translate': [h, k] option")
        return Report("Computed", command, kind, moments=_rows_json(_moments(inst)))

    if command == "relations":
        if two_d:
            return _completion_report(command, kind, _complete2(inst))
        if moment_kinds:
            seq = _moments(inst)
            mm = moment_matrix(seq, seq.degree // 2)
            return Report("Computed", command, kind, rank=rank(mm.mat),
                          relations=tuple(str(r) for r in column_relations(mm)))
        raise UnsupportedDegree("relations needs two-variable data")

    if command == "obstruct":
        if not moment_kinds:
            raise UnsupportedDegree("obstruct acts on moment tables")
        rep = flat_obstruction_check(_moments(inst))
        witness = None if rep.witness is None else tuple(rat_str(v) for v in rep.witness)
        return Report(
            rep.status, command, kind, rank=rep.rank, witness=witness,
            relations=() if rep.relation is None else (str(rep.relation),),
            matrices={"coefficients": {k: _affine_json(v) for k, v in rep.coefficients.items()}}
            if rep.coefficients else {},
            message=rep.reason or (f"row {rep.witness_row.label()}" if rep.witness_row else ""))

    if command == "hypo":
        if two_d:
            res = _complete2(inst)
            window = hyponormality_window(res.measure, inst.depth)
        elif moment_kinds:
            seq = _moments(inst)
            window = {tuple(u): is_psd(hyponormality_matrix(seq, u, 1).mat)
                      for u in monomial_basis(seq.degree - 2)}
        else:
            raise UnsupportedDegree("hypo needs two-variable data")
        checks = {f"M_({u[0]},{u[1]})(1)": ok for u, ok in window.items()}
        return Report("Feasible" if all(window.values()) else "Infeasible", command, kind,
                      checks=checks)

    raise ValidationError(f"unknown command {command!r}")


def run(command: str, instance: Instance) -> tuple[Report, int]:
    """Dispatch one command; errors become statuses, never exceptions."""
    try:
        report = _run(command, instance)
    except NoCompletion as exc:
        report = Report("NoCompletion", command, instance.kind, message=str(exc))
    except NotSingular as exc:
        report = Report("NotSingular", command, instance.kind, message=str(exc))
    except UnsupportedDegree as exc:
        report = Report("Unsupported", command, instance.kind, message=str(exc))
    except (ParseError, ValidationError, ValueError) as exc:
        report = Report("InputError", command, instance.kind, message=str(exc))
    except ConsistencyError as exc:
        report = Report("InternalError", command, instance.kind, message=str(exc))
    except ScpError as exc:
        report = Report("InternalError", command, instance.kind, message=str(exc))
    return report, report.exit_code


# -- formatting --------------------------------------------------------------

def _num_text(v) -> str:
    if isinstance(v, dict):
        return str(QuadExt(Fraction(v["p"]), Fraction(v["q"]), Fraction(v["radicand"])))
    return str(Fraction(v))


def _measure_text(atoms: Sequence[Mapping[str, Any]]) -> str:
    terms = []
    for atom in atoms:
        where = (_num_text(atom["t"]) if "t" in atom
                 else f"({_num_text(atom['x'])},{_num_text(atom['y'])})")
        rho = atom["density"]
        delta = f"δ_{{{where}}}"
        if rho == "1/1":
            terms.append(delta)
        elif isinstance(rho, dict):
            terms.append(f"({_num_text(rho)}) {delta}")
        else:
            terms.append(f"{_num_text(rho)} {delta}")
    return " + ".join(terms)


def format_report(r: Report, mode: str = "text") -> bytes:
    if mode == "json":
        return (json.dumps(r.to_dict(), sort_keys=True, separators=(",", ":"),
                           ensure_ascii=False) + "\n").encode("utf-8")
    if mode != "text":
        raise ValueError(f"unknown format {mode!r}")
    lines = [f"status: {r.status}"]
    if r.command:
        lines.append(f"command: {r.command}" + (f" ({r.kind})" if r.kind else ""))
    if r.case:
        lines.append(f"case: {r.case}")
    if r.rank is not None:
        lines.append(f"rank: {r.rank}")
    if r.new_weights:
        lines.append("new weights: " + ", ".join(
            f"{k}={_num_text(v)}" for k, v in sorted(r.new_weights.items())))
    if r.measure:
        lines.append(f"μ = {_measure_text(r.measure)}")
    for rel in r.relations:
        lines.append(f"relation: {rel} = 0")
    coeffs = r.matrices.get("coefficients") if r.matrices else None
    if coeffs:
        lines.extend(f"A_{k} = {_affine_text(v)}" for k, v in sorted(coeffs.items()))
    if r.witness:
        a, b = (_num_text(v) for v in r.witness)
        lines.append(f"witness: combination {a} vs entry {b}")
    for d, row in enumerate(r.moments):
        lines.append(f"degree {d}: " + ", ".join(_num_text(v) for v in row))
    failed = sorted(k for k, ok in r.checks.items() if not ok)
    if r.checks:
        lines.append(f"checks: {len(r.checks) - len(failed)}/{len(r.checks)} passed"
                     + (f" (failed: {', '.join(failed)})" if failed else ""))
    if r.message:
        lines.append(f"note: {r.message}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="scpkit",
                                     description="Exact subnormal completion solver.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--input", default="-", help="instance JSON file, '-' for stdin")
    parser.add_argument("--format", choices=("json", "text"), default="text")
    parser.add_argument("--depth", type=int, default=None,
                        help="completion depth (overrides the instance)")
    parser.add_argument("--out", default="-", help="report file, '-' for stdout")
    args = parser.parse_args(argv)

    try:
        if args.input == "-":
            text = sys.stdin.buffer.read()
        else:
            with open(args.input, "rb") as fh:
                text = fh.read()
        inst = parse_instance(text)
        if args.depth is not None:
            if args.depth < 2:
                raise ValidationError("--depth must be at least 2")
            inst = Instance(inst.kind, inst.payload, args.depth, inst.translate)
    except (OSError, ParseError, ValidationError) as exc:
        report = Report("InputError", args.command, message=str(exc))
    else:
        report, _ = run(args.command, inst)

    out = format_report(report, args.format)
    if args.out == "-":
        sys.stdout.buffer.write(out)
        sys.stdout.flush()
    else:
        with open(args.out, "wb") as fh:
            fh.write(out)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
