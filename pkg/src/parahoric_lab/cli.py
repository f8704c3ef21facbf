"""Command-line interface: ``parahoric-lab <command> ...``.

Every command reads JSON (a path, ``-`` for stdin, or an inline JSON
string) and writes either a human-readable summary or, with ``--json``,
a JSON document in which rationals are rendered as ``"num/den"``.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import __version__
from .degree_stability import (
    InternalConsistencyError,
    ParabolicHiggsDatum,
    ReductionDatum,
    canonical_mu,
    equivariant_degree,
    fmt,
    full_report,
    parabolic_degree,
    parahoric_degree_routes,
)
from .descent import DescentError, EquivariantLocalDatum, ParahoricLocalDatum, from_parahoric, to_parahoric
from .laurent import EquivarianceClass, LaurentError, LaurentMatrix, equivariance_violation
from .parahoric_local import (
    ParabolicProfile,
    bound_violations,
    hecke_shift,
    is_higgs_member,
    is_liftable,
    is_member,
    profile,
)
from .root_datum import ParabolicType, RootDatum, Weight, as_fraction, unit_root

CSV_HEADER_COMMENT = "#parahoric-lab v1"
EXIT_CODES = {"stable": 0, "semistable": 1, "unstable": 2}
EXIT_INPUT_ERROR = 3
EXIT_INTERNAL = 4


class InputError(Exception):
    pass


def load_json(source: str):
    if source == "-":
        text, where = sys.stdin.read(), "<stdin>"
    elif source.lstrip().startswith(("{", "[")):
        text, where = source, "<inline>"
    else:
        path = Path(source)
        if not path.exists():
            raise InputError(f"no such file: {source}")
        text, where = path.read_text(), source
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{where}: parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def parse_rational_list(text: str) -> list[Fraction]:
    try:
        return [as_fraction(x) for x in text.split(",") if x.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse rational list {text!r}: {exc}") from exc


def read_weight(obj) -> Weight:
    try:
        return Weight(tuple(as_fraction(x) for x in obj))
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad weight {obj!r}: {exc}") from exc


def _weight_arg(args) -> tuple[Weight, RootDatum | None]:
    if args.theta is not None:
        theta = Weight(tuple(parse_rational_list(args.theta)))
        group = args.group
    elif args.input is not None:
        obj = load_json(args.input)
        if "theta" not in obj:
            raise InputError("input JSON needs a 'theta' field")
        theta = read_weight(obj["theta"])
        group = obj.get("group", args.group)
        if "n" in obj and int(obj["n"]) != theta.n:
            raise InputError(f"n={obj['n']} but theta has {theta.n} coordinates")
    else:
        raise InputError("give --theta or an input JSON")
    datum = None
    if group in ("gl", "sl"):
        datum = RootDatum.gl(theta.n) if group == "gl" else RootDatum.sl(theta.n)
    return theta, datum


def emit(args, payload: dict, human: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=False))
    else:
        print(human)


def cmd_profile(args) -> int:
    theta, datum = _weight_arg(args)
    p = profile(datum, theta)
    payload = p.to_json()
    human = [f"weight {theta}  (denominator {theta.denominator})", p.table()]
    if args.both_conventions:
        payload["cells_transposed"] = p.cells(transposed=True)
        human += ["transposed reading:", p.table(transposed=True)]
    emit(args, payload, "\n".join(human))
    return 0


def _read_matrix(obj: dict) -> LaurentMatrix:
    try:
        return LaurentMatrix.from_json(obj)
    except (LaurentError, TypeError, ValueError) as exc:
        raise InputError(f"bad matrix: {exc}") from exc


def _class_from_header(obj: dict) -> EquivarianceClass:
    if "a" in obj:
        if "d" not in obj:
            raise InputError("header with 'a' needs 'd'")
        return EquivarianceClass(int(obj["d"]), tuple(int(x) for x in obj["a"]))
    if "theta" in obj:
        theta = read_weight(obj["theta"])
        return EquivarianceClass.from_weight(theta, int(obj["d"]) if "d" in obj else None)
    raise InputError("header needs {'d', 'a'} or {'theta'}")


def _matrix_payload(m: LaurentMatrix, extra: dict) -> dict:
    out = dict(extra)
    out.update(m.to_json())
    return out


def cmd_descend(args) -> int:
    obj = load_json(args.input)
    m = _read_matrix(obj)
    cls = _class_from_header(obj)
    e = EquivariantLocalDatum(cls.d, cls.exponents, m)
    p = to_parahoric(e)
    lines = [f"theta = {p.theta}, d = {cls.d}", _render(p.element)]
    if args.verify:
        back = from_parahoric(p, cls.d)
        if back.element != m:
            raise DescentError("round trip lift(descend(m)) != m")
        lines.append("verified: equivariant input, parahoric membership, round trip")
    payload = _matrix_payload(p.element, {"theta": [fmt(c) for c in p.theta.coords], "d": cls.d})
    emit(args, payload, "\n".join(lines))
    return 0


def cmd_lift(args) -> int:
    obj = load_json(args.input)
    m = _read_matrix(obj)
    if "theta" not in obj:
        raise InputError("lift needs a 'theta' header")
    theta = read_weight(obj["theta"])
    p = ParahoricLocalDatum(theta, m)
    if args.verify and not p.is_valid():
        bad = bound_violations(m, p.profile)
        where = f" at entry ({bad[0][0] + 1},{bad[0][1] + 1}) exponent {bad[0][2]}" if bad else ""
        raise DescentError(f"input is not in the parahoric group{where}")
    e = from_parahoric(p, obj.get("d"))
    lines = [f"d = {e.d}, a = {list(e.delta_exponents)}", _render(e.element)]
    if args.verify:
        if to_parahoric(e).element != m:
            raise DescentError("round trip descend(lift(m)) != m")
        lines.append("verified: membership, equivariance, round trip")
    payload = _matrix_payload(e.element, {"d": e.d, "a": list(e.delta_exponents)})
    emit(args, payload, "\n".join(lines))
    return 0


def _render(m: LaurentMatrix) -> str:
    cells = m.render()
    width = max(len(c) for row in cells for c in row)
    body = "\n".join("[ " + "  ".join(c.ljust(width) for c in row) + " ]" for row in cells)
    return body + (f"  {m.form}" if m.kind == "higgs" else "")


def cmd_member(args) -> int:
    obj = load_json(args.input)
    m = _read_matrix(obj)
    if "theta" not in obj:
        raise InputError("member needs a 'theta' header")
    theta = read_weight(obj["theta"])
    p = profile(None, theta)
    payload = {"theta": [fmt(c) for c in theta.coords], "kind": m.kind}
    if m.kind == "group":
        ok = is_member(m, p)
    else:
        ok = is_higgs_member(m, p)
    payload["member"] = ok
    lines = [f"member of the parahoric {'group' if m.kind == 'group' else 'Lie algebra'}: {ok}"]
    for i, j, k, b in bound_violations(m, p):
        lines.append(f"  entry ({i + 1},{j + 1}): exponent {k} below bound {b}")
    if args.parabolic is not None:
        if m.kind != "higgs":
            raise InputError("--parabolic applies to Higgs coefficients")
        sizes = [int(x) for x in args.parabolic.split(",")]
        pp = ParabolicProfile(p, ParabolicType(tuple(sizes), args.opposite))
        lift_ok = ok and is_liftable(m, pp)
        payload["liftable"] = lift_ok
        lines.append(f"liftable to the parabolic {sizes}{' (opposite)' if args.opposite else ''}: {lift_ok}")
        ok = lift_ok
    emit(args, payload, "\n".join(lines))
    return 0 if ok else 1


def _read_datum(source: str) -> ParabolicHiggsDatum:
    obj = load_json(source)
    try:
        return ParabolicHiggsDatum.from_json(obj)
    except (TypeError, ValueError, KeyError, ZeroDivisionError) as exc:
        raise InputError(f"bad datum: {exc}") from exc


def _parse_subset(text: str, n: int) -> frozenset:
    try:
        s = frozenset(int(x) - 1 for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise InputError(f"bad subset {text!r}") from exc
    if any(i < 0 or i >= n for i in s):
        raise InputError(f"subset {text!r} is not inside 1..{n}")
    return s


def cmd_degree(args) -> int:
    d = _read_datum(args.input)
    payload: dict = {"par_deg": fmt(parabolic_degree(d, range(d.n)))}
    lines = [f"parabolic degree of E: {parabolic_degree(d, range(d.n))}"]
    if d.group_tag == "gl":
        payload["canonical_mu"] = fmt(canonical_mu(d))
        lines.append(f"canonical mu (parabolic slope): {canonical_mu(d)}")
    if args.subset is not None:
        s = _parse_subset(args.subset, d.n)
        payload["subset"] = {"subset": sorted(i + 1 for i in s), "par_deg": fmt(parabolic_degree(d, s))}
        lines.append(f"parabolic degree of {sorted(i + 1 for i in s)}: {parabolic_degree(d, s)}")
    if args.flag is not None:
        flag = [_parse_subset(part, d.n) for part in args.flag.split(";")]
        if args.character is None:
            raise InputError("--flag needs --character")
        try:
            r = ReductionDatum(tuple(flag), tuple(parse_rational_list(args.character)))
            via_char, via_blocks = parahoric_degree_routes(d, r)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        if via_char != via_blocks:
            raise InternalConsistencyError(f"parahoric degree routes disagree: {via_char} vs {via_blocks}")
        payload["parahoric_degree"] = {"via_character": fmt(via_char), "via_blocks": fmt(via_blocks)}
        lines.append(f"parahoric degree: {via_char} (both routes agree)")
        if args.cover_order is not None:
            try:
                up = equivariant_degree(d, r, args.cover_order)
            except ValueError as exc:
                raise InputError(str(exc)) from exc
            payload["equivariant_degree"] = {"cover_order": args.cover_order, "value": fmt(up)}
            lines.append(f"equivariant degree on the order-{args.cover_order} cover: {up}")
    emit(args, payload, "\n".join(lines))
    return 0


def _summary(rep) -> str:
    lines = [f"canonical mu: {rep.mu_used}" if rep.mu_used is not None else "canonical mu: (sl data)"]
    for label, r in (("Higgs pair", rep), ("underlying bundle", rep.underlying)):
        lines.append(f"{label}: R={r.R.verdict}  R_mu={r.R_mu.verdict}  slope={r.slope.verdict}")
        if r.slope.witness is not None:
            w = r.slope.witness
            lines.append(f"  witness subset {[i + 1 for i in w.subset]}, slope margin {w.margin}")
    return "\n".join(lines)


def cmd_stability(args) -> int:
    d = _read_datum(args.input)
    try:
        rep = full_report(d)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    emit(args, rep.to_json(), _summary(rep))
    return EXIT_CODES[rep.verdict]


@dataclass(frozen=True)
class WallScanConfig:
    template: ParabolicHiggsDatum
    grid: tuple[tuple[tuple[Fraction, ...], ...], ...]
    output_path: str | None = None

    @classmethod
    def from_json(cls, obj: dict) -> "WallScanConfig":
        try:
            template = ParabolicHiggsDatum(
                int(obj["n"]), tuple(obj["degrees"]), (), obj.get("higgs"), obj.get("group", "gl")
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad wall-scan template: {exc}") from exc
        grid = []
        for point in obj.get("grid", []):
            if len(point) != template.n:
                raise InputError(f"each grid point needs {template.n} coordinate ranges")
            grid.append(tuple(_axis_values(axis) for axis in point))
        if not grid:
            raise InputError("wall scan needs at least one marked point in 'grid'")
        return cls(template, tuple(grid), obj.get("output"))

    def axes(self) -> list[tuple[Fraction, ...]]:
        return [axis for point in self.grid for axis in point]


def _axis_values(axis) -> tuple[Fraction, ...]:
    if isinstance(axis, dict) and "values" in axis:
        return tuple(as_fraction(v) for v in axis["values"])
    if isinstance(axis, dict):
        start, stop = as_fraction(axis["start"]), as_fraction(axis["stop"])
        den = int(axis.get("den", 1))
        if den <= 0:
            raise InputError("grid step denominators must be positive")
        if stop < start:
            raise InputError(f"empty range {start}..{stop}")
        count = int((stop - start) * den) + 1
        return tuple(start + Fraction(k, den) for k in range(count))
    return (as_fraction(axis),)


def _scan_row(args):
    template, n, values = args
    points = [Weight(tuple(values[k * n:(k + 1) * n])) for k in range(len(values) // n)]
    d = template.with_points(points)
    rep = full_report(d)
    w = rep.slope.witness
    return (
        rep.R.verdict,
        rep.R_mu.verdict,
        rep.slope.verdict,
        "" if rep.mu_used is None else fmt(rep.mu_used),
        "" if w is None else " ".join(str(i + 1) for i in w.subset),
        "" if w is None else fmt(w.margin),
    )


def run_wall_scan(config: WallScanConfig, jobs: int = 1) -> str:
    axes = config.axes()
    n = config.template.n
    index_grid = list(itertools.product(*(range(len(a)) for a in axes)))
    tasks = [(config.template, n, [axes[k][i] for k, i in enumerate(idx)]) for idx in index_grid]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_scan_row, tasks, chunksize=16))
    else:
        rows = [_scan_row(t) for t in tasks]
    buf = io.StringIO()
    buf.write(CSV_HEADER_COMMENT + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    theta_cols = [f"theta_{p + 1}_{i + 1}" for p in range(len(config.grid)) for i in range(n)]
    writer.writerow(["index", *theta_cols, "R", "R_mu", "slope", "mu", "witness", "margin"])
    for idx, task, row in zip(index_grid, tasks, rows):
        writer.writerow([":".join(map(str, idx)), *(fmt(v) for v in task[2]), *row])
    return buf.getvalue()


def cmd_walls(args) -> int:
    config = WallScanConfig.from_json(load_json(args.input))
    text = run_wall_scan(config, args.jobs)
    out = args.output or config.output_path
    if out:
        try:
            Path(out).write_text(text)
        except OSError as exc:
            raise InputError(f"cannot write {out}: {exc}") from exc
        if not args.json:
            print(f"wrote {text.count(chr(10)) - 2} rows to {out}")
        else:
            print(json.dumps({"output": out, "rows": text.count("\n") - 2}))
    else:
        sys.stdout.write(text)
    return 0


def cmd_hecke(args) -> int:
    theta, datum = _weight_arg(args)
    shift = parse_rational_list(args.shift)
    if len(shift) != theta.n:
        raise InputError("shift has wrong length")
    if any(x.denominator != 1 for x in shift):
        raise InputError(f"shift {args.shift} is not integral")
    base = profile(datum, theta)
    shifted = hecke_shift(base, shift)
    payload = shifted.to_json()
    lines = [f"weight {theta} + {tuple(int(x) for x in shift)} = {shifted.theta}", shifted.table()]
    if args.check:
        direct = profile(datum, shifted.theta)
        n = theta.n
        law = all(
            shifted.bounds[i][j]
            == base.bounds[i][j] - sum(x * r for x, r in zip(shift, unit_root(n, i, j)))
            for i in range(n)
            for j in range(n)
            if i != j
        )
        ok = law and direct.bounds == shifted.bounds
        payload["check"] = ok
        lines.append(f"check m_r(theta + shift) = m_r(theta) - r(shift): {ok}")
        if not ok:
            emit(args, payload, "\n".join(lines))
            return 1
    emit(args, payload, "\n".join(lines))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="emit JSON")
    common.add_argument("--verify", action="store_true", default=argparse.SUPPRESS,
                        help="run membership/equivariance and round-trip checks")

    parser = argparse.ArgumentParser(prog="parahoric-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--json", action="store_true", default=False, help="emit JSON")
    parser.add_argument("--verify", action="store_true", default=False,
                        help="run membership/equivariance and round-trip checks")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", parents=[common], help="pole-order profile of a weight")
    p.add_argument("input", nargs="?", help="weight JSON {'theta': [...], 'group': ...}")
    p.add_argument("--theta", help="comma-separated rationals, e.g. 1/2,-1/2")
    p.add_argument("--group", default="gl", choices=["gl", "sl", "custom"])
    p.add_argument("--both-conventions", action="store_true", help="also print the transposed reading")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("descend", parents=[common], help="equivariant w-matrix to parahoric z-matrix")
    p.add_argument("input", help="matrix JSON with header {'d', 'a'} or {'theta'}")
    p.set_defaults(func=cmd_descend)

    p = sub.add_parser("lift", parents=[common], help="parahoric z-matrix to equivariant w-matrix")
    p.add_argument("input", help="matrix JSON with header {'theta'} and optional 'd'")
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("member", parents=[common], help="parahoric membership of a z-matrix")
    p.add_argument("input", help="matrix JSON with header {'theta'}")
    p.add_argument("--parabolic", help="Levi block sizes, e.g. 1,1, to test liftability of a Higgs field")
    p.add_argument("--opposite", action="store_true", help="use the block-lower-triangular parabolic")
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("degree", parents=[common], help="parabolic, parahoric and equivariant degrees")
    p.add_argument("input", help="datum JSON")
    p.add_argument("--subset", help="1-based indices, e.g. 1,3")
    p.add_argument("--flag", help="flag members separated by ';', e.g. '1;1,2'")
    p.add_argument("--character", help="block values, e.g. -1,1")
    p.add_argument("--cover-order", type=int, help="also compute the equivariant degree upstairs")
    p.set_defaults(func=cmd_degree)

    p = sub.add_parser("stability", parents=[common], help="R, R_mu and slope stability report")
    p.add_argument("input", help="datum JSON")
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("walls", parents=[common], help="scan weights over a grid and write CSV")
    p.add_argument("input", help="wall-scan config JSON")
    p.add_argument("-o", "--output", help="CSV path (default: config 'output' or stdout)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for grid evaluation")
    p.set_defaults(func=cmd_walls)

    p = sub.add_parser("hecke", parents=[common], help="shift a weight by an integral cocharacter")
    p.add_argument("input", nargs="?", help="weight JSON")
    p.add_argument("--theta", help="comma-separated rationals")
    p.add_argument("--group", default="gl", choices=["gl", "sl", "custom"])
    p.add_argument("--shift", required=True, help="comma-separated integers")
    p.add_argument("--check", action="store_true", help="verify the shifted bounds against the direct profile")
    p.set_defaults(func=cmd_hecke)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InternalConsistencyError as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (InputError, LaurentError, ValueError, TypeError, KeyError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
