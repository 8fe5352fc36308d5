"""Command-line front end.

Every command prints one JSON report with ``"theorem"`` and ``"verdict"``
fields.  Exit status: 0 pass, 1 fail, 2 malformed input or usage.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from .algebra import (
    AlgebraFamily,
    Family,
    FamilyDimensionError,
    algebra_from_json,
    classify_profile,
    make_algebra,
    power_profile,
)
from .automorphisms import (
    build_automorphism,
    family_algebra,
    is_automorphism,
    random_automorphism,
)
from .linalg import DimensionError, Matrix
from .local import (
    SHAPES,
    WitnessError,
    counterexample,
    is_local_automorphism,
    matches_local_shape,
    shape_discrepancy_report,
    solve_witness,
)
from .scalars import fmt, parse, to_complex
from .twolocal import PointMap, PointMapError, verify_2local
from .verdict import Verdict

PASS, FAIL, MALFORMED = 0, 1, 2


class InputError(ValueError):
    """Bad arguments or unreadable input: exit status 2."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    family: str | None
    n: int | None
    seed: int
    samples: int
    mode: str
    shape: str
    infile: str | None
    outfile: str | None
    x: str | None


def _jsonable(obj):
    if hasattr(obj, "to_json"):
        return _jsonable(obj.to_json())
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    return fmt(obj)


def _emit(cfg: RunConfig, report: dict, artifact: dict | None = None) -> None:
    text = json.dumps(_jsonable(report), indent=2, sort_keys=True)
    if cfg.outfile:
        body = report if artifact is None else artifact
        try:
            with open(cfg.outfile, "w") as fh:
                fh.write(json.dumps(_jsonable(body), indent=2, sort_keys=True) + "\n")
        except OSError as exc:
            raise InputError(f"cannot write {cfg.outfile}: {exc}") from exc
    print(text)


def _load(cfg: RunConfig) -> dict | list:
    if not cfg.infile:
        raise InputError(f"{cfg.command} needs --in FILE")
    try:
        with open(cfg.infile) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {cfg.infile}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{cfg.infile} is not valid JSON: {exc}") from exc


def _family(cfg: RunConfig, doc=None) -> AlgebraFamily:
    name = cfg.family
    n = cfg.n
    if isinstance(doc, dict):
        name = name or doc.get("family")
        n = n if n is not None else doc.get("n")
    if name is None:
        raise InputError("no family given (use --family or a 'family' field)")
    if n is None and isinstance(doc, dict) and isinstance(doc.get("matrix"), list):
        n = len(doc["matrix"])
    if not isinstance(n, int) or isinstance(n, bool):
        raise InputError("no dimension given (use --n or an 'n' field)")
    try:
        return AlgebraFamily(Family.parse(name), n)
    except (ValueError, FamilyDimensionError) as exc:
        raise InputError(str(exc)) from exc


def _matrix(cfg: RunConfig, doc) -> Matrix:
    rows = doc.get("matrix") if isinstance(doc, dict) else doc
    if not isinstance(rows, list):
        raise InputError("input needs a 'matrix' field (list of rows)")
    try:
        m = Matrix.from_json(rows)
    except (ValueError, TypeError, DimensionError) as exc:
        raise InputError(f"malformed matrix: {exc}") from exc
    return m.approx() if cfg.mode == "approx" else m


def _vector(cfg: RunConfig, doc, n: int) -> tuple:
    if cfg.x is not None:
        raw = [t.strip() for t in cfg.x.split(",")]
    elif isinstance(doc, dict) and "x" in doc:
        raw = doc["x"]
    else:
        raise InputError("witness needs --x 'x1,...,xn' or an 'x' field")
    if not isinstance(raw, list) or len(raw) != n:
        raise InputError(f"x must have {n} coordinates")
    try:
        x = tuple(parse(v) for v in raw)
    except (ValueError, TypeError) as exc:
        raise InputError(f"malformed x: {exc}") from exc
    return tuple(to_complex(v) for v in x) if cfg.mode == "approx" else x


def _report(cfg: RunConfig, theorem: str, verdict: Verdict, **extra) -> tuple[int, dict]:
    report = {"command": cfg.command, "theorem": theorem, **extra}
    report.update(verdict.to_json())
    return (PASS if verdict else FAIL), report


# ---------------------------------------------------------------------------
# commands


def cmd_gen_aut(cfg: RunConfig) -> int:
    fam = _family(cfg)
    params = random_automorphism(fam, seed=cfg.seed)
    m = build_automorphism(params)
    check = is_automorphism(family_algebra(fam), m)
    if not check:
        # the closed form disagrees with the oracle: refuse to write it
        _emit(cfg, {"command": cfg.command, "theorem": f"aut-{fam.tag.value}", **check.to_json()})
        return FAIL
    artifact = {
        "family": fam.tag.value,
        "n": fam.n,
        "seed": cfg.seed,
        "params": params.to_json(),
        "matrix": m.to_json(),
    }
    _emit(cfg, {"command": cfg.command, "theorem": f"aut-{fam.tag.value}",
                "verdict": "pass", **artifact}, artifact)
    return PASS


def cmd_check_aut(cfg: RunConfig) -> int:
    doc = _load(cfg)
    fam = _family(cfg, doc)
    m = _matrix(cfg, doc)
    if m.n != fam.n:
        raise InputError(f"matrix is {m.n}x{m.n}, family has n={fam.n}")
    status, report = _report(cfg, f"aut-{fam.tag.value}", is_automorphism(family_algebra(fam), m),
                             family=fam.tag.value, n=fam.n)
    _emit(cfg, report)
    return status


def cmd_check_local(cfg: RunConfig) -> int:
    doc = _load(cfg)
    fam = _family(cfg, doc)
    m = _matrix(cfg, doc)
    if m.n != fam.n:
        raise InputError(f"matrix is {m.n}x{m.n}, family has n={fam.n}")
    if cfg.samples < fam.n:
        raise InputError(f"--samples must be at least n={fam.n} to cover every branch")
    v = is_local_automorphism(fam, m, samples=cfg.samples, seed=cfg.seed, shape=cfg.shape)
    detail = dict(v.detail)
    witnesses = detail.pop("witnesses", [])
    modes = sorted({w.mode for w in witnesses})
    detail["witness_count"] = len(witnesses)
    detail["witness_modes"] = modes
    detail["witnesses"] = witnesses[: fam.n]
    verdict = Verdict(v.passed, v.reason, detail)
    status, report = _report(cfg, f"local-{fam.tag.value}", verdict,
                             family=fam.tag.value, n=fam.n, samples=cfg.samples, seed=cfg.seed)
    _emit(cfg, report)
    return status


def cmd_witness(cfg: RunConfig) -> int:
    doc = _load(cfg)
    fam = _family(cfg, doc)
    m = _matrix(cfg, doc)
    if m.n != fam.n:
        raise InputError(f"matrix is {m.n}x{m.n}, family has n={fam.n}")
    x = _vector(cfg, doc, fam.n)
    theorem = f"witness-{fam.tag.value}"
    try:
        w = solve_witness(fam, m, x, shape=cfg.shape)
    except WitnessError as exc:
        status, report = _report(cfg, theorem, Verdict.fail(exc.reason, **exc.detail),
                                 family=fam.tag.value, n=fam.n)
    except DimensionError as exc:
        raise InputError(str(exc)) from exc
    else:
        status, report = _report(cfg, theorem, Verdict.ok(**w.to_json()),
                                 family=fam.tag.value, n=fam.n)
    _emit(cfg, report)
    return status


def cmd_counterexample(cfg: RunConfig) -> int:
    fam = _family(cfg)
    m = counterexample(fam)
    if cfg.mode == "approx":
        m = m.approx()
    local = is_local_automorphism(fam, m, samples=max(cfg.samples, fam.n), seed=cfg.seed)
    aut = is_automorphism(family_algebra(fam), m)
    ok = bool(local) and not aut
    artifact = {"family": fam.tag.value, "n": fam.n, "matrix": m.to_json()}
    report = {
        "command": cfg.command,
        "theorem": "local-not-aut",
        **artifact,
        "local": {"verdict": "pass" if local else "fail", "reason": local.reason,
                  "samples": max(cfg.samples, fam.n)},
        "automorphism": aut.to_json(),
        "verdict": "pass" if ok else "fail",
    }
    _emit(cfg, report, artifact)
    return PASS if ok else FAIL


def cmd_check_2local(cfg: RunConfig) -> int:
    doc = _load(cfg)
    if not isinstance(doc, dict):
        raise InputError("point map must be a JSON object")
    fam = _family(cfg, doc)
    doc = {**doc, "family": fam.tag.value, "n": fam.n}
    try:
        pm = PointMap.from_json(doc)
        if cfg.mode == "approx":
            pm = PointMap(fam, tuple(
                (tuple(map(to_complex, x)), tuple(map(to_complex, fx))) for x, fx in pm.samples
            ))
    except (PointMapError, ValueError, TypeError) as exc:
        raise InputError(f"malformed point map: {exc}") from exc
    status, report = _report(cfg, "twolocal", verify_2local(fam, pm),
                             family=fam.tag.value, n=fam.n, samples=len(pm.samples))
    _emit(cfg, report)
    return status


def cmd_profile(cfg: RunConfig) -> int:
    if cfg.infile:
        doc = _load(cfg)
        try:
            alg = algebra_from_json(doc)
        except (ValueError, TypeError, KeyError, DimensionError) as exc:
            raise InputError(f"malformed algebra: {exc}") from exc
        label = "custom"
        expected = None
    else:
        fam = _family(cfg)
        alg = make_algebra(fam)
        label = fam.tag.value
        expected = "null-filiform" if fam.tag is Family.MU0 else "filiform"
    kind = classify_profile(alg)
    try:
        dims = list(power_profile(alg).dims)
    except ArithmeticError:
        dims = None
    ok = kind != "neither" if expected is None else kind == expected
    report = {
        "command": cfg.command,
        "theorem": "profile",
        "algebra": label,
        "n": alg.n,
        "dims": dims,
        "class": kind,
        "verdict": "pass" if ok else "fail",
    }
    _emit(cfg, report)
    return PASS if ok else FAIL


def cmd_shape_report(cfg: RunConfig) -> int:
    fam = _family(cfg)
    report = shape_discrepancy_report(fam, count=cfg.samples, seed=cfg.seed)
    report = {"command": cfg.command, "theorem": f"local-{fam.tag.value}-shapes", **report}
    _emit(cfg, report)
    return PASS if report["verdict"] == "pass" else FAIL


def cmd_check_shape(cfg: RunConfig) -> int:
    doc = _load(cfg)
    fam = _family(cfg, doc)
    m = _matrix(cfg, doc)
    if m.n != fam.n:
        raise InputError(f"matrix is {m.n}x{m.n}, family has n={fam.n}")
    status, report = _report(cfg, f"local-{fam.tag.value}", matches_local_shape(fam, m, cfg.shape),
                             family=fam.tag.value, n=fam.n)
    _emit(cfg, report)
    return status


COMMANDS = {
    "gen-aut": (cmd_gen_aut, "seeded random automorphism (params and matrix)"),
    "check-aut": (cmd_check_aut, "brute-force automorphism check of a matrix"),
    "check-local": (cmd_check_local, "shape plus sampled witnesses"),
    "check-shape": (cmd_check_shape, "local-automorphism shape only"),
    "witness": (cmd_witness, "automorphism agreeing with a matrix at one vector"),
    "counterexample": (cmd_counterexample, "a local automorphism that is not an automorphism"),
    "check-2local": (cmd_check_2local, "reconstruct and verify a sampled 2-local map"),
    "profile": (cmd_profile, "power profile and null-filiform/filiform class"),
    "shape-report": (cmd_shape_report, "compare both shape variants with the witness verifier"),
}


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="filiaut", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, (_, helptext) in COMMANDS.items():
        s = sub.add_parser(name, help=helptext)
        s.add_argument("--family", help="mu0, mu11, mu12, mu13 or mu14")
        s.add_argument("--n", type=int, help="dimension")
        s.add_argument("--seed", type=int, default=0, help="seed (FILIAUT_SEED overrides)")
        s.add_argument("--samples", type=int, default=200, help="sampled points or matrices")
        s.add_argument("--mode", choices=("exact", "approx"), default="exact")
        s.add_argument("--shape", choices=SHAPES, default="derived", help="shape variant")
        s.add_argument("--in", dest="infile", help="input JSON file")
        s.add_argument("--out", dest="outfile", help="output JSON file")
        s.add_argument("--x", help="comma-separated vector for 'witness'")
    return p


def config_from_args(argv=None) -> RunConfig:
    args = _parser().parse_args(argv)
    seed = args.seed
    env = os.environ.get("FILIAUT_SEED")
    if env is not None and env.strip():
        try:
            seed = int(env)
        except ValueError:
            raise InputError(f"FILIAUT_SEED must be an integer, got {env!r}") from None
    if seed < 0:
        raise InputError("seed must be non-negative")
    if args.samples < 1:
        raise InputError("--samples must be at least 1")
    return RunConfig(args.command, args.family, args.n, seed, args.samples, args.mode,
                     args.shape, args.infile, args.outfile, args.x)


def main(argv=None) -> int:
    try:
        cfg = config_from_args(argv)
        return COMMANDS[cfg.command][0](cfg)
    except SystemExit as exc:  # argparse usage errors
        return MALFORMED if exc.code else PASS
    except InputError as exc:
        print(json.dumps({"verdict": "malformed", "error": str(exc)}), file=sys.stderr)
        return MALFORMED


if __name__ == "__main__":
    sys.exit(main())
