"""Command-line surface: curve reports, form evaluation, component listings,
operator application, graph building, and oracle consistency suites.

Curve selection
---------------
Every command takes the curve either from ``--weights 2,3,7`` or from a JSON
config file via ``--config``::

    {
      "weights": [2, 2, 2, 2],
      "lambda": ["0", "inf", "1", "1/2"],
      "seed": 7,
      "trials": 8
    }

``lambda`` lists the marked-point parameters as exact rational strings with
``"inf"`` for the point at infinity; the first three are pinned to
``0, inf, 1``.  ``seed`` and ``trials`` supply defaults for the sampling
commands.  The seed may also come from the ``LOOPCRYSTAL_SEED`` environment
variable; an explicit ``--seed`` wins over both.

Grammars
--------
K-theory classes are written ``"r*O + d*delta + m*S[i,j]"`` (point indices
1-based), e.g. ``"2*O + 3*delta - S[1,1]"``; the bare string ``"0"`` is the
zero class.  Sheaf labels are ``O`` / ``O(expr)`` with ``expr`` a sum of
``c``-multiples and generators (``O(-1)`` means ``O(-c)``, ``O(c - x1)`` is
accepted), ``S[i,j]`` / ``S[i,j,l]`` for serial torsion at weighted point
``i``, ``T[pt](d)`` for torsion at a named ordinary point, and ``E(v...)``
for a rank >= 2 bundle given by its full coordinate vector.

Output and exit codes
---------------------
Commands print JSON on stdout (DOT with ``--dot``).  Exit status is 0 on
success, 2 when the request falls outside the supported label families or the
input is malformed, and 3 when a structural check fails (axiom violation,
oracle disagreement).
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import os
import re
import sys
from fractions import Fraction
from pathlib import Path

from . import catalog as cat
from . import components as comp
from . import crystal as cry
from . import ktheory as kt
from . import oracle as orc
from .starlattice import WeightData


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

def _parse_weights_text(text: str) -> tuple[int, ...]:
    try:
        ws = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise ValueError(f"weights must be a comma-separated integer list, got {text!r}")
    if not ws:
        raise ValueError("empty weight list")
    return ws


def _check_lambda(values) -> tuple[str, ...]:
    out = []
    for v in values:
        s = str(v)
        if s != "inf":
            try:
                Fraction(s)
            except (ValueError, ZeroDivisionError):
                raise ValueError(f"marked-point parameter {s!r} is not rational or 'inf'")
        out.append(s)
    return tuple(out)


def load_config(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as err:
        raise ValueError(f"cannot read config file: {err}")
    except json.JSONDecodeError as err:
        raise ValueError(f"config file is not valid JSON: {err}")
    if not isinstance(data, dict):
        raise ValueError("config file must hold a JSON object")
    return data


def resolve_curve(args, config: dict) -> WeightData:
    if args.weights is not None:
        weights = _parse_weights_text(args.weights)
    elif "weights" in config:
        weights = tuple(int(w) for w in config["weights"])
    else:
        weights = (1, 1, 1)
    labels = None
    if "lambda" in config:
        labels = _check_lambda(config["lambda"])
    return WeightData(weights, labels)


def resolve_seed(args, config: dict) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("LOOPCRYSTAL_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"LOOPCRYSTAL_SEED must be an integer, got {env!r}")
    return int(config.get("seed", 0))


def resolve_trials(args, config: dict) -> int:
    if getattr(args, "trials", None) is not None:
        return args.trials
    return int(config.get("trials", orc.DEFAULT_TRIALS))


# ---------------------------------------------------------------------------
# grammars
# ---------------------------------------------------------------------------

_TERM_SPLIT = re.compile(r"[+-]?[^+-]+")


def _signed_terms(text: str) -> list[str]:
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty expression")
    terms = _TERM_SPLIT.findall(s)
    if "".join(terms) != s:
        raise ValueError(f"cannot tokenize expression {text!r}")
    return terms


def parse_kclass(curve: WeightData, text: str) -> kt.KClass:
    """Parse the ``"r*O + d*delta + m*S[i,j]"`` grammar."""
    acc = kt.zero_class(curve)
    for term in _signed_terms(text):
        sign = 1
        if term[0] == "+":
            term = term[1:]
        elif term[0] == "-":
            sign, term = -1, term[1:]
        coeff = 1
        if "*" in term:
            mult, term = term.split("*", 1)
            try:
                coeff = int(mult)
            except ValueError:
                raise ValueError(f"bad multiplicity {mult!r} in class expression")
        if term == "O":
            base = kt.structure_class(curve)
        elif term == "delta":
            base = kt.delta_class(curve)
        else:
            m = re.fullmatch(r"S\[(\d+),(\d+)\]", term)
            if m:
                i = int(m.group(1))
                if not (1 <= i <= curve.n):
                    raise ValueError(f"point index {i} out of range in {term!r}")
                base = kt.class_of_simple(curve, i - 1, int(m.group(2)))
            elif re.fullmatch(r"\d+", term):
                if int(term) != 0:
                    raise ValueError(
                        f"bare integer {term!r} in class expression (write k*O, k*delta, ...)"
                    )
                continue
            else:
                raise ValueError(f"cannot parse class term {term!r}")
        acc = kt.add(acc, kt.scale(sign * coeff, base))
    return acc


def parse_lelement(curve: WeightData, text: str):
    """Degree-lattice element: sum of ``kc``, ``k`` (c-units), and ``k xi`` terms."""
    coeffs = [0] * curve.n
    l = 0
    for term in _signed_terms(text):
        m = re.fullmatch(r"([+-]?\d*)c", term)
        if m:
            l += int(m.group(1) + "1") if m.group(1) in ("", "+", "-") else int(m.group(1))
            continue
        m = re.fullmatch(r"([+-]?\d*)x(\d+)", term)
        if m:
            idx = int(m.group(2))
            if not (1 <= idx <= curve.n):
                raise ValueError(f"generator index {idx} out of range in {term!r}")
            k = int(m.group(1) + "1") if m.group(1) in ("", "+", "-") else int(m.group(1))
            coeffs[idx - 1] += k
            continue
        m = re.fullmatch(r"[+-]?\d+", term)
        if m:
            l += int(term)
            continue
        raise ValueError(f"cannot parse degree term {term!r}")
    return curve.normalize(coeffs, l=l)


def parse_sheaf_label(curve: WeightData, text: str) -> cat.IndecLabel:
    s = text.strip()
    if s == "O":
        label = cat.LineBundle(curve.zero())
    elif s.startswith("O(") and s.endswith(")"):
        label = cat.LineBundle(parse_lelement(curve, s[2:-1]))
    else:
        m = re.fullmatch(r"S\[(\d+),(-?\d+)(?:,(\d+))?\](?:\((\d+)\))?", s)
        if m:
            if m.group(3) and m.group(4):
                raise ValueError(f"give the length once in {s!r}")
            i = int(m.group(1))
            if not (1 <= i <= curve.n):
                raise ValueError(f"point index {i} out of range in {s!r}")
            length = int(m.group(3) or m.group(4) or 1)
            label = cat.exc_torsion(curve, i - 1, int(m.group(2)), length)
        else:
            m = re.fullmatch(r"T\[([^\],]+)(?:,(\d+))?\](?:\((\d+)\))?", s)
            if m:
                if m.group(2) and m.group(3):
                    raise ValueError(f"give the length once in {s!r}")
                label = cat.OrdTorsion(m.group(1), int(m.group(2) or m.group(3) or 1))
            else:
                m = re.fullmatch(r"E\((.*)\)", s)
                if m:
                    try:
                        vec = [int(v) for v in m.group(1).split(",")]
                    except ValueError:
                        raise ValueError(f"coordinate vector must be integers in {s!r}")
                    label = cat.RealBundle(kt.from_vector(curve, vec))
                else:
                    raise ValueError(f"cannot parse sheaf label {text!r}")
    cat.validate(curve, label)
    return label


def load_component(curve: WeightData, spec: str) -> comp.ComponentLabel:
    if spec == "empty":
        return comp.EMPTY
    try:
        data = json.loads(Path(spec).read_text())
    except OSError as err:
        raise ValueError(f"cannot read component file {spec!r}: {err}")
    except json.JSONDecodeError as err:
        raise ValueError(f"component file {spec!r} is not valid JSON: {err}")
    return comp.label_from_json(data, curve)


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _emit(payload) -> None:
    print(json.dumps(payload, indent=2))


def _fail(message: str) -> None:
    print(f"error: {message}", file=sys.stderr)


def _slope_str(value) -> str:
    return "inf" if value == math.inf else str(Fraction(value))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_curve_info(args, config: dict) -> int:
    curve = resolve_curve(args, config)
    g = curve.genus()
    regime = "finite" if g < 1 else ("tubular" if g == 1 else "wild")
    omega = curve.omega()
    _emit(
        {
            "weights": list(curve.weights),
            "points": list(curve.labels),
            "p": curve.p,
            "genus": str(g),
            "regime": regime,
            "k_rank": kt.lattice_rank(curve),
            "omega": omega.to_json(),
            "omega_display": curve.format_element(omega),
        }
    )
    return 0


def cmd_class(args, config: dict) -> int:
    curve = resolve_curve(args, config)
    a = parse_kclass(curve, args.lhs)
    if args.verb == "euler":
        b = parse_kclass(curve, args.rhs)
        _emit(
            {
                "lhs": a.to_json(),
                "rhs": b.to_json(),
                "euler": kt.euler_form(curve, a, b),
            }
        )
    else:
        _emit(
            {
                "class": a.to_json(),
                "rank": a.r,
                "degree": kt.degree_d(curve, a),
                "slope": _slope_str(kt.slope(curve, a)),
            }
        )
    return 0


def cmd_sheaf(args, config: dict) -> int:
    curve = resolve_curve(args, config)
    a = parse_sheaf_label(curve, args.lhs)
    if args.verb == "hom":
        b = parse_sheaf_label(curve, args.rhs)
        _emit(
            {
                "lhs": cat.format_label(curve, a),
                "rhs": cat.format_label(curve, b),
                "hom": cat.hom_dim(curve, a, b),
                "ext": cat.ext_dim(curve, a, b),
            }
        )
    else:
        _emit(
            {
                "label": cat.format_label(curve, a),
                "class": cat.class_of(curve, a).to_json(),
                "rigid": cat.is_rigid(curve, a),
            }
        )
    return 0


def cmd_components(args, config: dict) -> int:
    curve = resolve_curve(args, config)
    a = parse_kclass(curve, args.klass)
    g = curve.genus()
    if a.r == 0:
        labels = comp.enumerate_torsion_components(curve, a)
    elif g < 1:
        labels = comp.enumerate_components_finite(
            curve, a, min_degree=args.min_degree, real_bundle_box=args.real_bundle_box
        )
    elif g == 1:
        window = None
        if args.slope_window is not None:
            lo, hi = args.slope_window
            window = (
                Fraction(lo),
                math.inf if hi == "inf" else Fraction(hi),
            )
        labels = comp.enumerate_components_tubular(
            curve, a, slope_window=window, max_parts=args.max_parts
        )
    else:
        raise ValueError(
            "unsupported family: no component enumeration for rank > 0 beyond genus 1"
        )
    _emit(
        {
            "class": a.to_json(),
            "count": len(labels),
            "components": [
                {
                    "display": comp.format_label(curve, z),
                    "expected_dim": comp.expected_dim(curve, z),
                    "label": comp.label_to_json(curve, z),
                }
                for z in labels
            ],
        }
    )
    return 0


def cmd_crystal_apply(args, config: dict) -> int:
    curve = resolve_curve(args, config)
    color = parse_sheaf_label(curve, args.color)
    z = load_component(curve, args.component)
    op = {"epsilon": "eps", "f_max": "fmax"}.get(args.op, args.op)
    report = {
        "op": op,
        "color": cat.format_label(curve, color),
        "input": comp.label_to_json(curve, z),
    }
    if op == "eps":
        report["value"] = cry.epsilon(curve, z, color)
    elif op == "phi":
        report["value"] = cry.phi(curve, z, color)
    else:
        image = {
            "fmax": cry.f_max,
            "f": cry.f,
            "e": cry.e,
        }[op](curve, z, color)
        if image is None:
            report["output"] = None
        else:
            report["output"] = comp.label_to_json(curve, image)
            report["display"] = comp.format_label(curve, image)
    _emit(report)
    return 0


def _budget_from_args(args) -> cry.Budget:
    return cry.Budget(
        max_rank=args.max_rank,
        max_deg=args.max_deg,
        max_delta=args.max_delta,
        max_nodes=args.max_nodes,
    )


def cmd_crystal_graph(args, config: dict) -> int:
    curve = resolve_curve(args, config)
    colors = [parse_sheaf_label(curve, text) for text in args.colors]
    seeds = [load_component(curve, spec) for spec in args.seeds]
    graph = cry.build_graph(curve, seeds, colors, _budget_from_args(args))
    if args.verify:
        violations = cry.verify_axioms(graph)
        if violations:
            _emit({"violations": violations, "count": len(violations)})
            return 3
    if args.dot:
        print(cry.to_dot(graph))
    else:
        _emit(cry.graph_to_json(graph))
    return 0


def cmd_crystal_verify(args, config: dict) -> int:
    try:
        data = json.loads(Path(args.graph).read_text())
    except OSError as err:
        raise ValueError(f"cannot read graph file {args.graph!r}: {err}")
    except json.JSONDecodeError as err:
        raise ValueError(f"graph file {args.graph!r} is not valid JSON: {err}")
    graph = cry.graph_from_json(data)
    violations = cry.verify_axioms(graph)
    _emit(
        {
            "nodes": len(graph.nodes),
            "edges": len(graph.edges),
            "violations": violations,
            "count": len(violations),
        }
    )
    return 3 if violations else 0


# ---------------------------------------------------------------------------
# oracle suites
# ---------------------------------------------------------------------------

def _case(name: str, expected, observed) -> dict:
    return {
        "test": name,
        "expected": expected,
        "observed": observed,
        "agree": expected == observed,
    }


def _small_multisegments(curve: WeightData, max_total: int):
    p = curve.weights[0]
    out = []
    for total in range(1, max_total + 1):
        for dims in itertools.product(range(total + 1), repeat=p):
            if sum(dims) == total:
                out.extend(comp.aperiodic_multisegments(curve, 0, dims))
    return sorted(out, key=lambda m: m.pairs)


def _cyclic_suite(seed: int, trials: int) -> list[dict]:
    cases = []
    for weights in ((2, 1, 1), (3, 1, 1)):
        curve = WeightData(weights)
        p = weights[0]
        battery = _small_multisegments(curve, 3)
        for m in battery:
            tag = f"p{p}:{list(m.pairs)}"
            recovered = orc.recover_type(orc.build_rep(curve, m))
            cases.append(_case(f"recover[{tag}]", list(m.pairs), list(recovered.pairs)))
            z = comp.component_label(curve, (), (), [m])
            for v in range(p):
                color = cat.exc_torsion(curve, 0, v, 1)
                eps = cry.epsilon(curve, z, color)
                sampled = orc.eps_sample(curve, m, v, 1, trials=trials, seed=seed)
                cases.append(_case(f"eps[{tag};v{v}]", eps, sampled))
                if eps == 0:
                    continue
                image = cry.f_max(curve, z, color)
                want = [] if not image.exceptional else list(image.exceptional[0].pairs)
                got = orc.quotient_type_sample(
                    curve, m, v, 1, eps, trials=trials, seed=seed
                )
                cases.append(_case(f"quot[{tag};v{v}]", want, list(got.pairs)))
    return cases


def _p1_suite(seed: int, trials: int) -> list[dict]:
    curve = WeightData((1, 1, 1))
    shapes = set()
    for size in (1, 2):
        for degs in itertools.combinations_with_replacement(range(-1, 3), size):
            shapes.add(tuple(sorted(degs, reverse=True)))
    shapes.add((3, 1, 1))  # forces the sampled kernel profile
    cases = []
    for degs in sorted(shapes, reverse=True):
        z = comp.component_label(
            curve, [cat.LineBundle(curve.normalize([0, 0, 0], l=d)) for d in degs], (), ()
        )
        for a in (-1, 0, 1):
            color = cat.LineBundle(curve.normalize([0, 0, 0], l=a))
            eps = cry.epsilon(curve, z, color)
            sampled = orc.p1_eps_sample(degs, a, trials=trials, seed=seed)
            cases.append(_case(f"eps[{list(degs)};O({a})]", eps, sampled))
    return cases


def cmd_oracle_check(args, config: dict) -> int:
    seed = resolve_seed(args, config)
    trials = resolve_trials(args, config)
    suite = {"cyclic": _cyclic_suite, "p1": _p1_suite}[args.suite]
    cases = suite(seed, trials)
    all_agree = all(entry["agree"] for entry in cases)
    _emit(
        {
            "suite": args.suite,
            "seed": seed,
            "trials": trials,
            "cases": cases,
            "all_agree": all_agree,
        }
    )
    return 0 if all_agree else 3


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config", default=argparse.SUPPRESS,
        help="JSON config file with weights/lambda/seed/trials",
    )
    common.add_argument(
        "--weights", default=argparse.SUPPRESS,
        help="comma-separated weight list, e.g. 2,3,7",
    )
    parser = argparse.ArgumentParser(
        prog="loopcrystal",
        description="Exact combinatorics of nilpotent Higgs components and crystal operators.",
    )
    parser.add_argument("--config", help="JSON config file with weights/lambda/seed/trials")
    parser.add_argument("--weights", help="comma-separated weight list, e.g. 2,3,7")
    sub = parser.add_subparsers(dest="command", required=True)

    curve = sub.add_parser("curve", help="curve-level reports")
    curve_sub = curve.add_subparsers(dest="verb", required=True)
    info = curve_sub.add_parser(
        "info", parents=[common],
        help="genus, regime, dualizing element, lattice rank",
    )
    info.set_defaults(func=cmd_curve_info)

    klass = sub.add_parser("class", help="K-theory lattice computations")
    klass_sub = klass.add_subparsers(dest="verb", required=True)
    euler = klass_sub.add_parser("euler", parents=[common], help="Euler form of two classes")
    euler.add_argument("lhs")
    euler.add_argument("rhs")
    euler.set_defaults(func=cmd_class)
    slope = klass_sub.add_parser(
        "slope", parents=[common], help="rank, degree, and slope of a class"
    )
    slope.add_argument("lhs")
    slope.set_defaults(func=cmd_class)

    sheaf = sub.add_parser("sheaf", help="indecomposable-sheaf computations")
    sheaf_sub = sheaf.add_subparsers(dest="verb", required=True)
    hom = sheaf_sub.add_parser(
        "hom", parents=[common], help="Hom and Ext dimensions between labels"
    )
    hom.add_argument("lhs")
    hom.add_argument("rhs")
    hom.set_defaults(func=cmd_sheaf)
    rigid = sheaf_sub.add_parser("rigid", parents=[common], help="rigidity of a label")
    rigid.add_argument("lhs")
    rigid.set_defaults(func=cmd_sheaf)

    comps = sub.add_parser("components", help="irreducible-component listings")
    comps_sub = comps.add_subparsers(dest="verb", required=True)
    clist = comps_sub.add_parser("list", parents=[common], help="labels of a positive class")
    clist.add_argument("--class", dest="klass", required=True, help="class expression")
    clist.add_argument("--min-degree", type=int, default=0, help="line-bundle degree floor (genus < 1)")
    clist.add_argument(
        "--real-bundle-box", type=int, default=None,
        help="coordinate box for rank >= 2 bundle summands (genus < 1)",
    )
    clist.add_argument(
        "--slope-window", nargs=2, metavar=("LO", "HI"), default=None,
        help="slope bounds for genus-1 splittings; HI may be 'inf'",
    )
    clist.add_argument("--max-parts", type=int, default=4, help="splitting length cap (genus 1)")
    clist.set_defaults(func=cmd_components)

    crystal = sub.add_parser("crystal", help="operators and graphs")
    crystal_sub = crystal.add_subparsers(dest="verb", required=True)
    apply_p = crystal_sub.add_parser("apply", parents=[common], help="apply one operator to a component label")
    apply_p.add_argument(
        "--op", required=True,
        choices=["eps", "epsilon", "phi", "f", "fmax", "f_max", "e"],
    )
    apply_p.add_argument("--color", required=True, help="rigid sheaf label, e.g. 'O(-1)' or 'S[1,0]'")
    apply_p.add_argument(
        "--component", required=True,
        help="component JSON file, or 'empty' for the empty label",
    )
    apply_p.set_defaults(func=cmd_crystal_apply)
    graph_p = crystal_sub.add_parser("graph", parents=[common], help="close seeds under raising and lowering")
    graph_p.add_argument("--seeds", nargs="+", required=True, help="component files or 'empty'")
    graph_p.add_argument("--colors", nargs="+", required=True, help="rigid sheaf labels")
    graph_p.add_argument("--max-rank", type=int, default=None)
    graph_p.add_argument("--max-deg", type=int, default=None, help="absolute degree cap in c-units")
    graph_p.add_argument("--max-delta", type=int, default=None, help="rank-0 window under k*delta")
    graph_p.add_argument("--max-nodes", type=int, default=None)
    graph_p.add_argument("--dot", action="store_true", help="emit DOT instead of JSON")
    graph_p.add_argument("--verify", action="store_true", help="check axioms before emitting")
    graph_p.set_defaults(func=cmd_crystal_graph)
    verify_p = crystal_sub.add_parser("verify", parents=[common], help="check axioms on a saved graph")
    verify_p.add_argument("--graph", required=True, help="graph JSON file")
    verify_p.set_defaults(func=cmd_crystal_verify)

    oracle = sub.add_parser("oracle", help="randomized consistency suites")
    oracle_sub = oracle.add_subparsers(dest="verb", required=True)
    check = oracle_sub.add_parser("check", parents=[common], help="replay closed rules against the sampler")
    check.add_argument("--suite", required=True, choices=["cyclic", "p1"])
    check.add_argument("--seed", type=int, default=None)
    check.add_argument("--trials", type=int, default=None)
    check.set_defaults(func=cmd_oracle_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config) if args.config else {}
        return args.func(args, config)
    except ValueError as err:
        _fail(str(err))
        return 2
    except AssertionError as err:
        _fail(f"internal inconsistency: {err}")
        return 3


if __name__ == "__main__":
    sys.exit(main())
