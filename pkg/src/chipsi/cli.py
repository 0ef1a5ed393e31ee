"""Command-line front end.

Exit codes: 0 when every check passes (bounds hold, point inside,
inclusion holds), 1 when a check fails, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import math
import os
import re
import sys
import time
from fractions import Fraction

from . import _rng, ch74, metaset, polytope, quantum, sampler, uncertainty
from .report import FORMATS, Report, emit

FORMAT_ENV = "CHIPSI_FORMAT"

CSV_HELP = (
    "csv output has two columns, key and value; keys are dotted paths into the "
    "json report (e.g. results.violations) and list values are space separated"
)


class UsageError(Exception):
    pass


# -- argument types ---------------------------------------------------------


def number(text: str) -> Fraction:
    """Exact parse of integers, decimals and p/q fractions."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


_ANGLE = re.compile(r"^\s*([+-]?)(\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$")


def angle(text: str) -> float:
    """Radians; accepts plain floats or multiples of pi such as 3pi/4, -pi/2."""
    m = _ANGLE.match(text)
    if m:
        sign, coef, div = m.groups()
        value = (float(coef) if coef else 1.0) * math.pi / (float(div) if div else 1.0)
        return -value if sign == "-" else value
    try:
        return float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an angle: {text!r}") from exc


def number_list(text: str) -> list[Fraction]:
    return [number(t) for t in text.split(",") if t.strip()]


def angle_list(text: str) -> list[float]:
    values = [angle(t) for t in text.split(",")]
    if len(values) != 4:
        raise argparse.ArgumentTypeError("need four angles a1,a2,b1,b2")
    return values


def pair_list(text: str) -> list[tuple[int, int]]:
    out = []
    for tok in filter(None, (t.strip() for t in text.split(","))):
        i, _, j = tok.partition("-")
        try:
            out.append((int(i), int(j)))
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"bad pair {tok!r}; use i-j") from exc
    return out


def seed_type(text: str) -> int:
    try:
        return _rng.check_seed(int(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def operator(text: str) -> quantum.HermitianOperator:
    try:
        return quantum.PAULI[text.lower().removeprefix("sigma").removeprefix("s")]
    except KeyError as exc:
        raise argparse.ArgumentTypeError(f"unknown operator {text!r}; use x, y, z or i") from exc


def state(text: str) -> quantum.StateVector:
    if text in quantum.NAMED_STATES:
        return quantum.named_state(text)
    try:
        amps = [complex(t.replace(" ", "")) for t in text.split(",")]
        return quantum.StateVector.normalized(amps)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad state {text!r}") from exc


def _scenario(args) -> polytope.Scenario:
    if args.n is not None:
        return polytope.Scenario(args.n, tuple(args.pairs or ()), tuple(args.exclusions or ()))
    return {
        "ch": polytope.CH_SCENARIO,
        "pair": polytope.PAIR_SCENARIO,
        "exclusive": polytope.EXCLUSIVE_SCENARIO,
    }[args.scenario]


def _witness(verdict: polytope.MembershipVerdict):
    if verdict.witness is None:
        return None
    return {"".join(map(str, v)): w for v, w in verdict.witness.items()}


def _membership_results(verdict: polytope.MembershipVerdict) -> dict:
    out = {
        "verdict": verdict.verdict,
        "exact": verdict.exact,
        "infeasibility": verdict.infeasibility,
        "witness": _witness(verdict),
    }
    if verdict.certificate is not None:
        h, h0 = verdict.certificate
        out["certificate"] = {"normal": list(h), "offset": h0}
    return out


# -- commands ---------------------------------------------------------------


def cmd_ch74_verify(args) -> Report:
    rep = ch74.verify_theorem(args.trials, args.seed)
    results = {
        "trials": rep.trials,
        "violations": rep.violations,
        "min_f": rep.min_f,
        "max_f": rep.max_f,
        "corner_min": rep.corner_min,
        "corner_max": rep.corner_max,
        "lower_attained": rep.lower_attained,
        "upper_attained": rep.upper_attained,
        "grid_denominator": rep.grid_denominator,
    }
    ok = rep.violations == 0 and rep.lower_attained and rep.upper_attained
    return Report("ch74 verify", {}, results, ok, generator=rep.generator)


def cmd_ch74_eval(args) -> Report:
    inst = ch74.CH74Instance(args.x1, args.x2, args.y1, args.y2, args.X, args.Y)
    v = ch74.check_bounds(inst)
    results = {
        "f": v.f,
        "lower": v.lower,
        "upper": v.upper,
        "residual_lower": v.residual_lower,
        "residual_upper": v.residual_upper,
        "holds": v.holds,
    }
    return Report("ch74 eval", {}, results, v.holds)


def cmd_polytope_membership(args) -> Report:
    s = _scenario(args)
    if args.angles is not None:
        if s != polytope.CH_SCENARIO:
            raise UsageError("--angles builds a CH scenario vector; use --scenario ch")
        p = quantum.ch_vector(quantum.MeasurementAngles(*args.angles))
    elif args.vector is not None:
        p = polytope.CorrelationVector.from_flat(s, args.vector)
    else:
        raise UsageError("need --vector or --angles")
    verdict = polytope.membership(s, p)
    results = {"vector": list(p.flat()), **_membership_results(verdict)}
    if s == polytope.CH_SCENARIO:
        results["ch_value"] = polytope.ch_facet_value(p)
        results["facet_residuals"] = dict(polytope.facet_residuals(p))
    elif s == polytope.PAIR_SCENARIO:
        results["boole_residuals"] = dict(polytope.boole_conditions_n2(p))
    return Report("polytope membership", {}, results, verdict.inside)


def cmd_polytope_trivial(args) -> Report:
    found = polytope.exclusive_pair_facets()
    labels = [q.label for q in found]
    expected = ["p1 >= 0", "p2 >= 0", "p1 + p2 <= 1"]
    results = {
        "facets": labels,
        "vertices": ["".join(map(str, v)) for v in polytope.enumerate_vertices(polytope.EXCLUSIVE_SCENARIO)],
    }
    return Report("polytope trivial", {}, results, sorted(labels) == sorted(expected))


def cmd_quantum_maximize(args) -> Report:
    sense = "min" if args.minimize else "max"
    angles, value = quantum.maximize_ch(args.grid_step, args.refine_iters, sense)
    results = {
        "sense": sense,
        "angles": list(angles.astuple()),
        "value": value,
        "classical_bounds": [-1, 0],
        "violation": not (-1 - 1e-9 <= value <= 1e-9),
    }
    return Report("quantum maximize-ch", {}, results, not results["violation"])


def cmd_uncertainty_check(args) -> Report:
    a, b, psi = args.a, args.b, args.state
    spec = uncertainty.psi_from_operators(a, b, psi)
    results = {"psi_window": [spec.z_min, spec.z_max], "Z": spec.Z}
    generator = None
    if args.samples:
        v = sampler.uncertainty_multi_sample(a, b, psi, args.samples, args.seed)
        results.update(
            lhs=v.lhs, rhs=v.rhs, standard_error=v.standard_error, band=v.band,
            holds=v.holds, spreads=list(v.spreads), size=v.size,
        )
        ok, generator = v.holds, v.generator
    else:
        v = uncertainty.check_uncertainty(a, b, psi)
        results.update(lhs=v.lhs, rhs=v.rhs, holds=v.holds, slack=v.slack)
        ok = v.holds
    return Report("uncertainty check", {}, results, ok, generator=generator)


def cmd_sample_single(args) -> Report:
    s = _scenario(args)
    if args.distribution == "uniform":
        d = sampler.JointDistribution.uniform(s.n)
    elif args.distribution == "point":
        bits = args.assignment or "1" * s.n
        if len(bits) != s.n or set(bits) - {"0", "1"}:
            raise UsageError(f"--assignment needs {s.n} binary digits")
        d = sampler.JointDistribution.point_mass(tuple(int(c) for c in bits))
    else:
        d = sampler.JointDistribution.random(s.n, _rng.generator(args.seed, "cli:distribution"))
    freq, verdict = sampler.single_sample_run(d, s, args.size, args.seed)
    results = {"vector": list(freq.vector.flat()), "size": freq.size, **_membership_results(verdict)}
    if s == polytope.CH_SCENARIO:
        results["ch_value"] = polytope.ch_facet_value(freq.vector)
    return Report("sample single", {}, results, verdict.inside, generator=freq.generator)


def cmd_sample_multi(args) -> Report:
    s = polytope.CH_SCENARIO
    if args.source == "quantum":
        if args.angles is not None:
            angles = quantum.MeasurementAngles(*args.angles)
        else:
            angles, _ = quantum.maximize_ch(math.pi / 360, 50)
        src = sampler.PairwiseSource.quantum(angles)
    elif args.source == "consistent":
        d = sampler.JointDistribution.random(s.n, _rng.generator(args.seed, "cli:distribution"))
        src = sampler.PairwiseSource.from_joint(d, s)
    else:
        bits = args.assignment or "1111"
        d = sampler.JointDistribution.point_mass(tuple(int(c) for c in bits))
        src = sampler.PairwiseSource.from_joint(d, s)
    res = sampler.multi_sample_run(src, s, args.size, args.seed)
    results = {
        "vector": list(res.frequencies.vector.flat()),
        "size_per_pair": res.frequencies.size,
        "ch_value": res.ch_value,
        "facet_residuals": dict(res.facet_residuals),
        "facet_standard_errors": res.facet_standard_errors,
        **_membership_results(res.verdict),
    }
    return Report("sample multi", {}, results, res.verdict.inside, generator=res.frequencies.generator)


def cmd_metaset_subset(args) -> Report:
    chi = ch74.ChiSpec(args.X, args.Y)
    if args.Z is not None:
        rep = metaset.subset_check(chi, args.Z)
        generator = None
    else:
        rep = metaset.sampled_subset_check(chi, args.a, args.b, args.state, args.trials, args.seed)
        generator = _rng.GENERATOR_NAME
    results = {
        "XY": chi.X * chi.Y,
        "Z": rep.Z,
        "holds": rep.holds,
        "witness": rep.witness,
        "samples_checked": rep.samples_checked,
        "escapes": rep.escapes,
    }
    return Report("metaset subset", {}, results, rep.holds, generator=generator)


# -- parser -----------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("output")
    g.add_argument("--seed", type=seed_type, default=0, help="64-bit seed (always recorded)")
    g.add_argument("--format", choices=FORMATS, default=None, help=f"report format; default ${FORMAT_ENV} or json")
    g.add_argument("--output", default=None, help="output path (default stdout)")
    g.add_argument("--config", default=None, help="key=value file; flags take precedence")
    g.add_argument("--timing", action="store_true", help="record wall-clock duration in the report")


def _scenario_args(p: argparse.ArgumentParser, default="ch") -> None:
    p.add_argument("--scenario", choices=("ch", "pair", "exclusive"), default=default)
    p.add_argument("--n", type=int, default=None, help="custom scenario: number of events")
    p.add_argument("--pairs", type=pair_list, default=None, help="custom pairs, e.g. 0-1,0-2")
    p.add_argument("--exclusions", type=pair_list, default=None, help="custom exclusions, e.g. 0-1")


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(prog="chipsi", description=__doc__, epilog=CSV_HELP)
    groups = parser.add_subparsers(dest="group", required=True)
    leaves: dict[str, argparse.ArgumentParser] = {}

    def leaf(group_sub, name, func, help_text):
        p = group_sub.add_parser(name, help=help_text, epilog=CSV_HELP)
        p.set_defaults(func=func)
        _common(p)
        leaves[f"{group_sub.dest}:{name}"] = p
        return p

    g = groups.add_parser("ch74").add_subparsers(dest="ch74", required=True)
    p = leaf(g, "verify", cmd_ch74_verify, "randomized check of -XY <= f <= 0")
    p.add_argument("--trials", type=int, default=10**6)
    p = leaf(g, "eval", cmd_ch74_eval, "evaluate f on one instance")
    for name in ("x1", "x2", "y1", "y2", "X", "Y"):
        p.add_argument(f"--{name}", type=number, required=True)

    g = groups.add_parser("polytope").add_subparsers(dest="polytope", required=True)
    p = leaf(g, "membership", cmd_polytope_membership, "LP membership of a correlation vector")
    _scenario_args(p)
    p.add_argument("--vector", type=number_list, default=None, help="singles then joints, comma separated")
    p.add_argument("--angles", type=angle_list, default=None, help="singlet vector at a1,a2,b1,b2 (e.g. 0,-pi/2,3pi/4,pi/4)")
    leaf(g, "trivial", cmd_polytope_trivial, "facets for two exclusive events")

    g = groups.add_parser("quantum").add_subparsers(dest="quantum", required=True)
    p = leaf(g, "maximize-ch", cmd_quantum_maximize, "optimize the singlet CH expression")
    p.add_argument("--grid-step", type=angle, default=math.pi / 360)
    p.add_argument("--refine-iters", type=int, default=50)
    p.add_argument("--minimize", action="store_true")

    g = groups.add_parser("uncertainty").add_subparsers(dest="uncertainty", required=True)
    p = leaf(g, "check", cmd_uncertainty_check, "uncertainty relation for Pauli operators")
    p.add_argument("--a", type=operator, default=quantum.SIGMA_X)
    p.add_argument("--b", type=operator, default=quantum.SIGMA_Y)
    p.add_argument("--state", type=state, default=quantum.named_state("+z"))
    p.add_argument("--samples", type=int, default=0, help="estimate from simulated measurements instead")

    g = groups.add_parser("sample").add_subparsers(dest="sample", required=True)
    p = leaf(g, "single", cmd_sample_single, "frequencies from one joint sample")
    _scenario_args(p)
    p.add_argument("--distribution", choices=("uniform", "point", "random"), default="uniform")
    p.add_argument("--assignment", default=None, help="bits for --distribution point, event 1 first")
    p.add_argument("--size", type=int, default=1000)
    p = leaf(g, "multi", cmd_sample_multi, "frequencies from one sample per component")
    p.add_argument("--source", choices=("quantum", "consistent", "point"), default="quantum")
    p.add_argument("--angles", type=angle_list, default=None)
    p.add_argument("--assignment", default=None)
    p.add_argument("--size", type=int, default=10**5)

    g = groups.add_parser("metaset").add_subparsers(dest="metaset", required=True)
    p = leaf(g, "subset", cmd_metaset_subset, "value-range inclusion check")
    p.add_argument("--X", type=number, required=True)
    p.add_argument("--Y", type=number, required=True)
    p.add_argument("--Z", type=number, default=None, help="analytic check against this Z")
    p.add_argument("--a", type=operator, default=quantum.SIGMA_X)
    p.add_argument("--b", type=operator, default=quantum.SIGMA_Y)
    p.add_argument("--state", type=state, default=quantum.named_state("+z"))
    p.add_argument("--trials", type=int, default=10**4)
    return parser, leaves


_NOT_ECHOED = {"func", "format", "output", "config", "timing", "group"}


def _load_config(path: str, leaf: argparse.ArgumentParser) -> dict[str, str]:
    known = {a.dest: a for a in leaf._actions if a.dest != "help"}
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, val = line.partition("=")
            key = key.strip().lstrip("-").replace("-", "_")
            if not sep:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            if key not in known or key in _NOT_ECHOED:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            val = val.strip()
            if isinstance(known[key], argparse._StoreTrueAction):
                values[key] = val.lower() in ("1", "true", "yes", "on")
            else:
                values[key] = val
    return values


def _echo(args) -> dict:
    out = {}
    for key, val in sorted(vars(args).items()):
        if key in _NOT_ECHOED or key in ("ch74", "polytope", "quantum", "uncertainty", "sample", "metaset"):
            continue
        if isinstance(val, quantum.HermitianOperator):
            val = next((k for k, v in quantum.PAULI.items() if v == val), val.matrix.tolist())
        elif isinstance(val, quantum.StateVector):
            val = [complex(x) for x in val.amplitudes]
        out[key] = val
    return out


def _parse(argv, parser, leaves):
    args = parser.parse_args(argv)
    if args.config:
        leaf = leaves[f"{args.group}:{getattr(args, args.group)}"]
        leaf.set_defaults(**_load_config(args.config, leaf))
        args = parser.parse_args(argv)
    return args


def run(argv: list[str] | None = None) -> int:
    parser, leaves = build_parser()
    try:
        args = _parse(argv, parser, leaves)
    except SystemExit as exc:
        return int(exc.code or 0) if exc.code in (0, None) else 2
    except (UsageError, OSError) as exc:
        print(f"chipsi: error: {exc}", file=sys.stderr)
        return 2
    fmt = args.format or os.environ.get(FORMAT_ENV, "json")
    if fmt not in FORMATS:
        print(f"chipsi: error: unsupported format {fmt!r}", file=sys.stderr)
        return 2
    start = time.perf_counter()
    try:
        report = args.func(args)
    except (UsageError, ValueError, TypeError, ArithmeticError) as exc:
        print(f"chipsi: error: {exc}", file=sys.stderr)
        return 2
    report.config = {"command": report.command, **_echo(args)}
    if args.timing:
        report.duration = time.perf_counter() - start
    data = emit(report, fmt)
    if args.output:
        with open(args.output, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return 0 if report.passed else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
