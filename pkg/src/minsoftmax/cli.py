"""Command-line front end.

Subcommands: validate, solve, sweep, simulate, verify, write-scenarios.
All outputs are plot-ready columnar text with 12-significant-digit floats,
written atomically (temp file + rename), and are deterministic functions of
the inputs, flags and seed. Exit codes: 0 success, 1 validation error,
2 solver infeasibility, 3 verification failure.

MINSOFTMAX_THREADS sets the worker count for sweep grids (default 1);
results are collected in grid order, so the thread count never changes the
output bytes.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import lq_gauss, oracle, scenarios
from .core import FiniteSystem, LqSystem, Penalties, SolveResult
from .errors import MBelowCritical, MinsoftmaxError, NoConvergence, ValidationError
from .montecarlo import RolloutSpec, rollout, write_stats
from .solver_finite import alpha_row, q_value, solve_backward, solve_limit

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INFEASIBLE = 2
EXIT_VERIFY_FAILED = 3


def _fmt(v: float) -> str:
    return f"{float(v):.12g}"


def _write_atomic(path: str, lines: list[str]) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get("MINSOFTMAX_THREADS", "1")))
    except ValueError:
        return 1


def _policy_hash(result) -> str:
    if isinstance(result, SolveResult):
        payload = result.policy.tobytes()
    else:
        payload = np.ascontiguousarray(result.gains).tobytes()
    return hashlib.sha256(payload).hexdigest()[:16]


# ---------------------------------------------------------------------------
# solve


def _solve_finite_files(sys_: FiniteSystem, res: SolveResult, out_dir: str) -> None:
    lines = ["stage state value"]
    for k in range(res.values.shape[0]):
        for x in range(res.values.shape[1]):
            lines.append(f"{k} {x} {_fmt(res.values[k, x])}")
    _write_atomic(os.path.join(out_dir, "values.txt"), lines)

    lines = ["stage state input"]
    for k in range(res.horizon):
        for x in range(res.policy.shape[1]):
            lines.append(f"{k} {x} {int(res.policy[k, x])}")
    _write_atomic(os.path.join(out_dir, "policy.txt"), lines)

    if res.adversary is not None:
        lines = ["stage state " + " ".join(f"p{w}" for w in range(sys_.n_dist))]
        for k in range(res.horizon):
            for x in range(sys_.n_states):
                lines.append(f"{k} {x} " + " ".join(_fmt(v) for v in res.adversary[k, x]))
        _write_atomic(os.path.join(out_dir, "adversary.txt"), lines)
    else:
        lines = ["stage state worst_disturbance"]
        for k in range(res.horizon):
            for x in range(sys_.n_states):
                lines.append(f"{k} {x} {int(res.worst_index[k, x])}")
        _write_atomic(os.path.join(out_dir, "worst_index.txt"), lines)


def _mat_lines(header: str, seq: np.ndarray) -> list[str]:
    lines = [header]
    for k in range(seq.shape[0]):
        m = np.atleast_2d(seq[k])
        for i in range(m.shape[0]):
            for j in range(m.shape[1]):
                lines.append(f"{k} {i} {j} {_fmt(m[i, j])}")
    return lines


def _solve_lq_files(lq: LqSystem, pen: Penalties, out_dir: str) -> float:
    if lq.horizon is None:
        sol = lq_gauss.solve_infinite_horizon(lq, pen)
        _write_atomic(os.path.join(out_dir, "p_bar.txt"), _mat_lines("i j value", sol.p_bar[None]))
        _write_atomic(os.path.join(out_dir, "gain.txt"), _mat_lines("i j value", sol.gain[None]))
        print(f"fixed point after {sol.iterations} iterations")
        return 0.0
    sol = lq_gauss.solve_finite_horizon(lq, pen)
    _write_atomic(os.path.join(out_dir, "p_mats.txt"), _mat_lines("stage i j value", sol.p_mats))
    _write_atomic(os.path.join(out_dir, "gains.txt"), _mat_lines("stage i j value", sol.gains))
    _write_atomic(os.path.join(out_dir, "adversary_mean_map.txt"),
                  _mat_lines("stage i j value", sol.adversary_mean_maps))
    _write_atomic(os.path.join(out_dir, "adversary_cov.txt"),
                  _mat_lines("stage i j value", sol.adversary_covs))
    _write_atomic(os.path.join(out_dir, "zetas.txt"),
                  ["stage zeta"] + [f"{k} {_fmt(z)}" for k, z in enumerate(sol.zetas)])
    return float(sol.zetas[0])


def cmd_solve(args) -> int:
    scn = scenarios.load_scenario(args.scenario)
    pen = Penalties(args.gamma_h, args.gamma_e)
    os.makedirs(args.out, exist_ok=True)
    if scn.kind == "finite":
        res = solve_backward(scn.system, pen)
        _solve_finite_files(scn.system, res, args.out)
        j0 = res.values[0]
        x0 = (scn.rollout_defaults or {}).get("initial_state")
        at = f" at_x0({x0})={_fmt(j0[int(x0)])}" if isinstance(x0, int) and 0 <= x0 < j0.shape[0] else ""
        print(f"J0 min={_fmt(j0.min())} mean={_fmt(j0.mean())} max={_fmt(j0.max())}{at}")
    else:
        zeta0 = _solve_lq_files(scn.system, pen, args.out)
        print(f"J0(0)=zeta_0={_fmt(zeta0)}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep


def _sweep_point(scn, gh, ge):
    pen = Penalties(gh, ge)
    if scn.kind == "finite":
        res = solve_backward(scn.system, pen)
        x0 = (scn.rollout_defaults or {}).get("initial_state", 0)
        x0 = int(x0) if isinstance(x0, (int, float)) and 0 <= int(x0) < scn.system.n_states else 0
        j0 = float(res.values[0, x0])
        return j0, _policy_hash(res), res.policy
    sol = lq_gauss.solve_finite_horizon(scn.system, pen) if scn.system.horizon is not None else None
    if sol is None:
        inf = lq_gauss.solve_infinite_horizon(scn.system, pen)
        gains = inf.gain[None]
        j0 = 0.0
    else:
        gains = sol.gains
        x0 = np.asarray((scn.rollout_defaults or {}).get("initial_state", [0.0] * scn.system.n_states), dtype=float)
        j0 = float(x0 @ sol.p_mats[0] @ x0 + sol.zetas[0])
    return j0, hashlib.sha256(np.ascontiguousarray(gains).tobytes()).hexdigest()[:16], gains


def cmd_sweep(args) -> int:
    scn = scenarios.load_scenario(args.scenario)
    grid = scn.penalty_grid or {}
    gh_list = args.gamma_h if args.gamma_h is not None else [float(v) for v in grid.get("gamma_h", [0.0])]
    ge_list = args.gamma_e if args.gamma_e is not None else [float(v) for v in grid.get("gamma_e", [0.0])]
    points = [(gh, ge) for gh in gh_list for ge in ge_list]

    def run(point):
        gh, ge = point
        try:
            return ("ok",) + _sweep_point(scn, gh, ge)
        except MinsoftmaxError as exc:
            return ("failed", type(exc).__name__, None, None)

    n_threads = _thread_count()
    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            outcomes = list(pool.map(run, points))
    else:
        outcomes = [run(p) for p in points]

    baseline = outcomes[0][3] if outcomes[0][0] == "ok" else None
    lines = ["gamma_h gamma_e j0 policy_hash hamming_to_first status"]
    for (gh, ge), oc in zip(points, outcomes):
        if oc[0] == "ok":
            _, j0, phash, pol = oc
            if baseline is not None and pol is not None and np.shape(pol) == np.shape(baseline):
                ham = str(int((np.asarray(pol) != np.asarray(baseline)).sum())) if pol.dtype.kind in "iu" \
                    else str(int((~np.isclose(pol, baseline, rtol=0, atol=0)).sum()))
            else:
                ham = "NA"
            lines.append(f"{_fmt(gh)} {_fmt(ge)} {_fmt(j0)} {phash} {ham} ok")
        else:
            lines.append(f"{_fmt(gh)} {_fmt(ge)} NA NA NA {oc[1]}")
    os.makedirs(args.out, exist_ok=True)
    _write_atomic(os.path.join(args.out, "sweep.txt"), lines)
    print(f"swept {len(points)} grid points ({sum(1 for o in outcomes if o[0] == 'ok')} ok)")
    return EXIT_OK


# ---------------------------------------------------------------------------
# simulate


def cmd_simulate(args) -> int:
    scn = scenarios.load_scenario(args.scenario)
    if scn.kind != "finite":
        raise ValidationError([], context="simulate requires a finite scenario")
    defaults = scn.rollout_defaults or {}
    spec = RolloutSpec(
        n_rollouts=args.rollouts if args.rollouts is not None else int(defaults.get("n_rollouts", 1000)),
        seed=args.seed if args.seed is not None else int(defaults.get("seed", 0)),
        disturbance_model=args.model or defaults.get("disturbance_model", "empirical"),
        initial_state=args.initial_state if args.initial_state is not None else int(defaults.get("initial_state", 0)),
    )
    pen = Penalties(args.gamma_h, args.gamma_e)
    res = solve_backward(scn.system, pen)
    stats, _ = rollout(scn.system, res, spec, state_map=scn.state_values())
    os.makedirs(args.out, exist_ok=True)
    write_stats(stats, os.path.join(args.out, "stats.txt"))
    se = stats.cost_std / np.sqrt(spec.n_rollouts)
    _write_atomic(os.path.join(args.out, "cost.txt"), [
        "mean_cost cost_std std_error n_rollouts seed",
        f"{_fmt(stats.mean_cost)} {_fmt(stats.cost_std)} {_fmt(se)} {spec.n_rollouts} {spec.seed}",
    ])
    print(f"simulated {spec.n_rollouts} rollouts (seed {spec.seed}): mean_cost={_fmt(stats.mean_cost)}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


class _Report:
    def __init__(self):
        self.failures = 0

    def check(self, name: str, ok: bool, observed, expected, tol) -> None:
        tag = "PASS" if ok else "FAIL"
        if not ok:
            self.failures += 1
        print(f"{tag} {name}: observed={observed} expected={expected} tol={tol}")


def _verify_simplex(scn, seed: int, rep: _Report) -> None:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(20):
        r = rng.dirichlet(np.ones(3))
        j = rng.uniform(-10.0, 10.0, 3)
        for gh, ge in ((0.5, 0.5), (1.0, 1.0), (5.0, 1.0), (1.0, 5.0)):
            pen = Penalties(gh, ge)
            q = q_value(alpha_row(r, j, gh), pen)
            _, best = oracle.simplex_search(r, j, pen, 0.001)
            worst = max(worst, abs(q - best))
    rep.check("simplex grid vs closed-form stage value (80 cases)", worst <= 1e-3, f"{worst:.3g}", "<=", 1e-3)


def _verify_quadrature(scn, seed: int, rep: _Report) -> None:
    lq = scn.system
    if not isinstance(lq, LqSystem) or lq.n_dist != 1 or lq.n_states != 1:
        print("SKIP quadrature: needs a scalar lq scenario")
        return
    pen = Penalties(4.0, 1.0)
    hz = lq.horizon if lq.horizon is not None else 1
    sized = LqSystem(lq.a, lq.b, lq.d, lq.q, lq.r, lq.q_h, horizon=hz)
    sol = lq_gauss.solve_finite_horizon(sized, pen)
    inflated = lq_gauss.f_a(sol.p_mats[1], sized, pen.gamma_h)
    worst = 0.0
    for x in np.linspace(-3, 3, 5):
        for u in np.linspace(-3, 3, 5):
            xi = float(sized.a[0, 0] * x + sized.b[0, 0] * u)
            closed = inflated[0, 0] * xi * xi + sol.zetas[0]
            quad = oracle.gaussian_quadrature_q(sized, sol.p_mats[1], 0.0, [x], [u], pen)
            worst = max(worst, abs(closed - quad))
    rep.check("trapezoid quadrature vs closed-form stage value (5x5 grid)", worst <= 1e-6, f"{worst:.3g}", "<=", 1e-6)


def _verify_limits(scn, seed: int, rep: _Report) -> None:
    if isinstance(scn.system, FiniteSystem) and scn.system.n_states <= 200:
        sys_ = scn.system
    else:
        rng = np.random.default_rng(seed)
        sys_ = _random_system(rng, 5, 3, 4, 4)
    rs = solve_backward(sys_, Penalties(1.0, 1.0))
    lim = solve_limit(sys_, "risk_sensitive", gamma=1.0)
    err = np.abs(rs.values - lim.values).max()
    rep.check("risk-sensitive diagonal", err <= 1e-10, f"{err:.3g}", "<=", 1e-10)

    lim = solve_limit(sys_, "sdp")
    # The softmax value exceeds the expectation by about Var/(2t) per stage,
    # so growing t by 100x must shrink the gap by ~100x; the absolute 1e-4
    # floor covers unit-scale systems that have already converged.
    err_lo = np.abs(solve_backward(sys_, Penalties(1e4, 1e4)).values - lim.values).max()
    err_hi = np.abs(solve_backward(sys_, Penalties(1e6, 1e6)).values - lim.values).max()
    ok = err_hi <= max(1e-4, 0.05 * err_lo)
    rep.check("stochastic-expectation limit", ok, f"{err_hi:.3g}",
              f"<= max(1e-4, 0.05*{err_lo:.3g})", "trend")

    mm = solve_backward(sys_, Penalties(0.0, 0.0))
    lim = solve_limit(sys_, "minimax")
    err = np.abs(mm.values - lim.values).max()
    rep.check("minimax corner", err == 0.0, f"{err:.3g}", "==", 0.0)

    ml = solve_backward(sys_, Penalties(1e9, 0.0))
    lim = solve_limit(sys_, "ml_ce")
    same = np.array_equal(ml.policy, lim.policy)
    rep.check("most-likely certainty-equivalent policy", same, same, True, "exact")


def _verify_attenuation(scn, seed: int, rep: _Report) -> None:
    lq = scn.system
    if not isinstance(lq, LqSystem):
        print("SKIP attenuation: needs an lq scenario")
        return
    inf_sys = LqSystem(lq.a, lq.b, lq.d, lq.q, lq.r, lq.q_h, horizon=None)
    crit = lq_gauss.critical_gamma_h(inf_sys, horizon=None)
    gh = 1.1 * crit.gamma_h
    sol = lq_gauss.solve_infinite_horizon(inf_sys, Penalties(gh, 0.0))
    cert = lq_gauss.certify_attenuation(
        inf_sys, sol.gain, float(np.sqrt(gh / 2.0)),
        lq_gauss.AttenuationProbes(seed=seed, adversary_gamma_h=gh),
    )
    rep.check("attenuation at 1.1x critical", cert.passed,
              f"{cert.max_ratio:.6g}", f"<= {cert.gamma_sq:.6g}", 1e-6)


def _random_system(rng, n_x, n_u, n_w, horizon) -> FiniteSystem:
    transition = rng.integers(0, n_x, size=(n_x, n_u, n_w))
    stage_cost = rng.uniform(0.0, 1.0, size=(n_x, n_u))
    terminal = rng.uniform(0.0, 1.0, size=n_x)
    emp = rng.dirichlet(np.ones(n_w), size=n_x)
    empirical = np.broadcast_to(emp[:, None, :], (n_x, n_u, n_w)).copy()
    return FiniteSystem(transition, stage_cost, terminal, empirical, horizon)


def cmd_verify(args) -> int:
    scn = scenarios.load_scenario(args.scenario)
    rep = _Report()
    suite = {
        "simplex": _verify_simplex,
        "quadrature": _verify_quadrature,
        "limits": _verify_limits,
        "attenuation": _verify_attenuation,
    }[args.suite]
    suite(scn, args.seed, rep)
    if rep.failures:
        print(f"{rep.failures} check(s) failed")
        return EXIT_VERIFY_FAILED
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v != ""]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="minsoftmax",
                                     description="Robust dynamic programming with softmax adversaries")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a scenario file")
    p.add_argument("scenario")

    p = sub.add_parser("solve", help="solve a scenario and write tables")
    p.add_argument("scenario")
    p.add_argument("--gamma-h", type=float, required=True)
    p.add_argument("--gamma-e", type=float, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("sweep", help="solve over a penalty grid")
    p.add_argument("scenario")
    p.add_argument("--gamma-h", type=_float_list, default=None, help="comma list, e.g. 0,1,10")
    p.add_argument("--gamma-e", type=_float_list, default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("simulate", help="solve then roll out the policy")
    p.add_argument("scenario")
    p.add_argument("--gamma-h", type=float, required=True)
    p.add_argument("--gamma-e", type=float, required=True)
    p.add_argument("--rollouts", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--initial-state", type=int, default=None)
    p.add_argument("--model", choices=("empirical", "adversarial"), default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("verify", help="run an oracle suite against the scenario")
    p.add_argument("scenario")
    p.add_argument("--suite", choices=("simplex", "quadrature", "limits", "attenuation"), required=True)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("write-scenarios", help="write the bundled scenario files")
    p.add_argument("out_dir")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            scn = scenarios.load_scenario(args.scenario)
            sysdesc = (f"finite {scn.system.n_states}x{scn.system.n_inputs}x{scn.system.n_dist}"
                       if scn.kind == "finite" else f"lq n={scn.system.n_states}")
            print(f"ok: {scn.name} ({sysdesc})")
            return EXIT_OK
        if args.command == "solve":
            return cmd_solve(args)
        if args.command == "sweep":
            return cmd_sweep(args)
        if args.command == "simulate":
            return cmd_simulate(args)
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "write-scenarios":
            for path in scenarios.write_bundled_scenarios(args.out_dir):
                print(path)
            return EXIT_OK
        raise AssertionError("unreachable")
    except (MBelowCritical, NoConvergence) as exc:
        print(f"ERROR {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except MinsoftmaxError as exc:
        print(f"ERROR {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
