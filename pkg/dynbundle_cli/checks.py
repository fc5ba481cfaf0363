"""The property battery behind ``dynbundle check``.

Each suite is a function of a ``CheckContext`` returning a ``SuiteResult``.
Suites share no state, so ``run_battery`` hands them to a thread pool.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np
import yaml

from dynbundle_cli.calculus.dynamics import (
    check_f_related,
    integrate_picard,
    integrate_rk4,
    whole_space_field,
)
from dynbundle_cli.calculus.newton import (
    GravityParams,
    config_to_phase,
    hamiltonian_field,
    lagrangian_field,
    phase_to_config,
)
from dynbundle_cli.calculus.smoothmap import (
    Cos,
    Exp,
    Input,
    Mul,
    Norm,
    Pow,
    Recip,
    Sin,
    SmoothMap,
    TangentLift,
    bilinear,
    compose,
    constant,
    coordinate,
    differential,
    evaluate_array,
    fd_oracle,
    linear_map,
)
from dynbundle_cli.calculus.tangent import (
    Covector,
    SecondTangent,
    TangentVector,
    canonical_flip,
    check_transition_smooth,
    circle_charts,
    monad_mult,
    monad_mult_lifted,
    monad_mult_map,
    monad_unit_map,
    projection,
    pullback,
    pushforward_diffeo,
    second_tangent_map,
    tangent_lift,
    tangent_map,
)
from dynbundle_cli.calculus.testing import (
    Path,
    Test,
    check_dinaturality,
    line_through,
    paths_equivalent,
    separating_test_search,
)
from dynbundle_cli.calculus.vecspace import NormSpec, Vector, check_metric_axioms, check_norm_axioms, norm
from dynbundle_cli.concurrency import run_named
from dynbundle_cli.constants import PRESET_NAMES
from dynbundle_cli.scenarios import parse_config, render_csv, run_scenario


SPACE = 3


@dataclass(frozen=True)
class CheckContext:
    seed: int = 7
    samples: int = 100

    def rng(self, salt: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, salt])


@dataclass
class SuiteResult:
    name: str
    passed: bool
    metric: float
    threshold: float
    detail: dict[str, Any] = field(default_factory=dict)
    seconds: float = 0.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "suite": self.name,
            "passed": self.passed,
            "metric": self.metric,
            "threshold": self.threshold,
            "seconds": round(self.seconds, 3),
            **self.detail,
        }


def _rel(a: np.ndarray, b: np.ndarray) -> float:
    return norm(a - b) / max(1.0, norm(b))


def _result(name: str, metric: float, threshold: float, **detail: Any) -> SuiteResult:
    return SuiteResult(name, bool(metric <= threshold), float(metric), threshold, detail)


# ---------------------------------------------------------------------------
# random maps R^3 -> R^3


def _primitives() -> dict[str, Callable[[np.random.Generator], SmoothMap]]:
    x = Input(SPACE)
    return {
        "linear": lambda rng: linear_map(rng.standard_normal((SPACE, SPACE)), x),
        "sin": lambda rng: Sin(linear_map(rng.standard_normal((SPACE, SPACE)), x)),
        "cos": lambda rng: Cos(x),
        "exp": lambda rng: Exp(0.3 * x),
        "recip": lambda rng: Recip(x + constant([4.0] * SPACE, SPACE)),
        "norm": lambda rng: Mul(x, Norm(x)),
        "pow": lambda rng: Pow(x, 3),
        "mul": lambda rng: Mul(x, linear_map(rng.standard_normal((SPACE, SPACE)), x)),
        "bilinear": lambda rng: bilinear(rng.standard_normal((SPACE, SPACE, SPACE)), x, x),
    }


def _random_map(rng: np.random.Generator) -> SmoothMap:
    factories = list(_primitives().values())
    return factories[int(rng.integers(len(factories)))](rng)


def _point(rng: np.random.Generator, n: int = SPACE) -> np.ndarray:
    return rng.uniform(-1.0, 1.0, n)


# ---------------------------------------------------------------------------
# suites


def suite_functoriality(ctx: CheckContext) -> SuiteResult:
    rng = ctx.rng(1)
    worst = 0.0
    pairs = 2 * ctx.samples
    for _ in range(pairs):
        f, g = _random_map(rng), _random_map(rng)
        tv = TangentVector.of(_point(rng), rng.standard_normal(SPACE))
        whole = tangent_map(compose(g, f), tv)
        stepwise = tangent_map(g, tangent_map(f, tv))
        worst = max(worst, _rel(whole.flat().coords, stepwise.flat().coords))
    return _result("functoriality", worst, 1e-12, pairs=pairs)


def suite_ad_vs_fd(ctx: CheckContext) -> SuiteResult:
    rng = ctx.rng(2)
    worst = 0.0
    per_primitive: dict[str, float] = {}
    for name, factory in _primitives().items():
        local = 0.0
        for _ in range(ctx.samples):
            f = factory(rng)
            u, e = _point(rng), rng.standard_normal(SPACE)
            ad = differential(f, u, e).coords
            fd = fd_oracle(f, u, e, h=1e-5).coords
            local = max(local, _rel(fd, ad))
        per_primitive[name] = local
        worst = max(worst, local)
    return _result("ad_vs_fd", worst, 1e-6, per_primitive=per_primitive)


def suite_second_tangent(ctx: CheckContext) -> SuiteResult:
    rng = ctx.rng(3)
    lift_gap = 0.0
    flip_gap = 0.0
    for _ in range(ctx.samples):
        f = _random_map(rng)
        st = SecondTangent.of(_point(rng), *(rng.standard_normal(SPACE) for _ in range(3)))
        direct = second_tangent_map(f, st).flat().coords
        doubled = evaluate_array(TangentLift(TangentLift(f)), st.flat())
        lift_gap = max(lift_gap, _rel(doubled, direct))
        lhs = second_tangent_map(f, canonical_flip(st)).flat().coords
        rhs = canonical_flip(second_tangent_map(f, st)).flat().coords
        flip_gap = max(flip_gap, _rel(lhs, rhs))
    passed = lift_gap <= 1e-12 and flip_gap <= 1e-10
    return SuiteResult(
        "second_tangent", passed, max(lift_gap, flip_gap), 1e-10,
        {"double_lift_gap": lift_gap, "flip_naturality_gap": flip_gap},
    )


def suite_projection(ctx: CheckContext) -> SuiteResult:
    """Naturality of the bundle projection, and the cross-section law of vector fields."""
    rng = ctx.rng(4)
    worst = 0.0
    for _ in range(2 * ctx.samples):
        f = _random_map(rng)
        tv = TangentVector.of(_point(rng), rng.standard_normal(SPACE))
        lhs = projection(tangent_map(f, tv)).coords
        rhs = evaluate_array(f, projection(tv))
        worst = max(worst, _rel(lhs, rhs))
        X = whole_space_field(f)
        x = _point(rng)
        worst = max(worst, norm(projection(X.coalgebra(x)).coords - x))
    return _result("projection_naturality", worst, 1e-14)


def suite_monad(ctx: CheckContext) -> SuiteResult:
    rng = ctx.rng(5)
    n = SPACE
    unit_lift = tangent_lift(monad_unit_map(n))
    mult = monad_mult_map(n)
    mult_lift = tangent_lift(mult)
    failures = 0
    for _ in range(ctx.samples):
        u, e = rng.integers(-5, 6, n).astype(float), rng.integers(-5, 6, n).astype(float)
        tv = TangentVector.of(u, e)
        left = monad_mult(SecondTangent.of(u, e, np.zeros(n), np.zeros(n)))
        right = monad_mult(SecondTangent.from_flat(evaluate_array(unit_lift, tv.flat())))
        if left != tv or right != tv:
            failures += 1
        point = rng.integers(-5, 6, 8 * n).astype(float)
        outer = evaluate_array(mult, monad_mult_lifted(point))
        inner_first = evaluate_array(mult, evaluate_array(mult_lift, point))
        if not np.array_equal(outer, inner_first):
            failures += 1
    return _result("monad_laws", failures, 0, samples=ctx.samples)


def _quadratic_path(u: np.ndarray, e: np.ndarray, c: np.ndarray) -> Path:
    s = Input(1)
    m = constant(u, 1) + linear_map(e.reshape(-1, 1), s) + linear_map(c.reshape(-1, 1), Pow(s, 2))
    return Path(m, 1.0)


def suite_testing_quotient(ctx: CheckContext) -> SuiteResult:
    rng = ctx.rng(6)
    mismatches = 0
    for k in range(ctx.samples):
        u, e = rng.standard_normal(2), rng.standard_normal(2)
        p1 = _quadratic_path(u, e, rng.standard_normal(2))
        kind = k % 3
        if kind == 0:
            p2 = _quadratic_path(u, e, rng.standard_normal(2))
        elif kind == 1:
            p2 = _quadratic_path(u, e + rng.standard_normal(2), rng.standard_normal(2))
        else:
            p2 = _quadratic_path(u + rng.standard_normal(2), e, rng.standard_normal(2))
        if paths_equivalent(p1, p2) != (separating_test_search(p1, p2) is None):
            mismatches += 1

    dinat = 0.0
    for _ in range(ctx.samples):
        f = _random_map(rng)
        p = line_through(_point(rng), rng.standard_normal(SPACE), 0.5)
        i, j = rng.integers(0, SPACE, 2)
        t = Test(Mul(coordinate(SPACE, int(i)), Sin(coordinate(SPACE, int(j)))))
        dinat = max(dinat, check_dinaturality(f, p, t))
    passed = mismatches == 0 and dinat <= 1e-12
    return SuiteResult(
        "testing_quotient", passed, float(mismatches), 0.0,
        {"dinaturality_residual": dinat},
    )


def suite_linear_ode(ctx: CheckContext) -> SuiteResult:
    X = whole_space_field(Input(1))
    end = integrate_rk4(X, [1.0], 1.0, 1e-3).final_state[0]
    error = abs(end - math.e)
    errs = [abs(integrate_rk4(X, [1.0], 1.0, dt).final_state[0] - math.e) for dt in (0.1, 0.05, 0.025)]
    ratios = [errs[0] / errs[1], errs[1] / errs[2]]
    picard = integrate_picard(X, [1.0], 0.5)
    rk4 = integrate_rk4(X, [1.0], 0.5, picard.dt)
    agreement = float(np.max(np.abs(picard.states - rk4.states)))
    passed = error <= 1e-9 and all(12 <= r <= 20 for r in ratios) and agreement <= 1e-6
    return SuiteResult(
        "linear_ode", passed, error, 1e-9,
        {"halving_ratios": ratios, "picard_rk4_gap": agreement},
    )


def suite_circular_orbit(ctx: CheckContext) -> SuiteResult:
    run = run_scenario(parse_config("scenario: {preset: gravity-circular}\n"))
    s = run.summary
    passed = s["return_distance"] <= 1e-4 and s["energy_drift"] <= 1e-7 and s["lz_drift"] <= 1e-8
    return SuiteResult(
        "circular_orbit", passed, s["return_distance"], 1e-4,
        {"energy_drift": s["energy_drift"], "lz_drift": s["lz_drift"]},
    )


def suite_newton_laws(ctx: CheckContext) -> SuiteResult:
    """Force-free straight lines, and momentum conservation for two bodies."""
    X = lagrangian_field(GravityParams(G=0.0))
    r0, v0 = np.array([1.0, 0.0, 0.0]), np.array([0.3, 0.2, 0.1])
    tr = integrate_rk4(X, np.concatenate([r0, v0]), 10.0, 1e-2)
    line = r0 + np.outer(tr.times, v0)
    line_gap = float(np.max(np.linalg.norm(tr.states[:, :3] - line, axis=1)))
    two = run_scenario(parse_config("scenario: {preset: two-body}\n"))
    momentum = two.summary["momentum_drift"]
    passed = line_gap <= 1e-9 and momentum <= 1e-9
    return SuiteResult(
        "newton_laws", passed, max(line_gap, momentum), 1e-9,
        {"free_line_gap": line_gap, "momentum_drift": momentum},
    )


def suite_lagrange_hamilton(ctx: CheckContext) -> SuiteResult:
    rng = ctx.rng(9)
    gp = GravityParams(G=1.0, m1=1.0, m2=2.0)
    L, H = lagrangian_field(gp), hamiltonian_field(gp)
    to_phase = config_to_phase(gp.m2)
    samples = []
    for _ in range(ctx.samples):
        direction = rng.standard_normal(SPACE)
        r = direction / np.linalg.norm(direction) * rng.uniform(0.5, 2.0)
        samples.append(np.concatenate([r, rng.standard_normal(SPACE)]))
    related = check_f_related(to_phase, L, H, samples)

    q0 = np.array([1.0, 0.0, 0.0, 0.0, 1.0, 0.0])
    lag = integrate_rk4(L, q0, 2.0 * math.pi, 1e-2)
    ham = integrate_rk4(H, evaluate_array(to_phase, q0), 2.0 * math.pi, 1e-2)
    back = phase_to_config(gp.m2)
    orbit_gap = max(
        norm(evaluate_array(back, h) - l) for h, l in zip(ham.states, lag.states)
    )
    passed = related <= 1e-12 and orbit_gap <= 1e-9
    return SuiteResult(
        "lagrange_hamilton", passed, max(related, orbit_gap), 1e-9,
        {"f_related_residual": related, "orbit_gap": orbit_gap},
    )


def suite_covectors(ctx: CheckContext) -> SuiteResult:
    rng = ctx.rng(11)
    worst = 0.0
    x = Input(SPACE)
    for _ in range(ctx.samples):
        A = np.eye(SPACE) + 0.3 * rng.standard_normal((SPACE, SPACE))
        b = rng.standard_normal(SPACE)
        shift = constant(b, SPACE)
        f = linear_map(A, x) + shift
        f_inv = linear_map(np.linalg.inv(A), x - shift)
        u = rng.standard_normal(SPACE)
        cv = Covector(Vector(evaluate_array(f, u)), Vector(rng.standard_normal(SPACE)))
        pulled = pullback(f, cv, u)
        pushed = pushforward_diffeo(f, f_inv, pulled)
        worst = max(worst, _rel(pushed.coeffs.coords, cv.coeffs.coords))
    return _result("covector_roundtrip", worst, 1e-9)


def suite_axioms(ctx: CheckContext) -> SuiteResult:
    """Genuine norms pass; the p = 1/2 quasi-norm must be caught breaking the triangle."""
    specs = [NormSpec.euclidean(), NormSpec.p_norm(1.0), NormSpec.p_norm(3.0), NormSpec.max_norm()]
    broken = []
    for spec in specs:
        for report in (check_norm_axioms(spec, ctx.samples, ctx.seed), check_metric_axioms(spec, ctx.samples, ctx.seed)):
            if not report.ok:
                broken.append(report.subject)
    quasi = check_norm_axioms(NormSpec.pseudo(0.5), ctx.samples, ctx.seed)
    caught = any(v.axiom == "N3" for v in quasi.violations)
    passed = not broken and caught
    return SuiteResult(
        "norm_axioms", passed, float(len(broken)), 0.0,
        {"broken": broken, "quasi_norm_caught": caught},
    )


def suite_charts(ctx: CheckContext) -> SuiteResult:
    rng = ctx.rng(12)
    phi0, phi0_inv, phi1 = circle_charts()
    k = max(1, ctx.samples // 4)
    points = rng.uniform(0.5, 3.0, k) * rng.choice([-1.0, 1.0], size=k)
    samples = [np.array([s]) for s in points]
    report = check_transition_smooth(phi0, phi0_inv, phi1, samples)
    metric = max(report.max_first_deviation, report.max_second_deviation)
    return _result("chart_transition", metric, 1e-6, **report.to_dict())


def _short_config(preset: str) -> str:
    doc: dict[str, Any] = {"scenario": {"name": f"determinism-{preset}", "preset": preset}}
    if preset == "custom":
        doc["params"] = {"dt": 0.001, "t_end": 0.05}
        doc["field"] = "(x1, -1.0 * (x0))"
        doc["initial_state"] = [1.0, 0.0]
    else:
        doc["params"] = {"t_end": 0.05}
    return yaml.safe_dump(doc, sort_keys=False)


def suite_determinism(ctx: CheckContext) -> SuiteResult:
    differing = []
    for preset in PRESET_NAMES:
        cfg = parse_config(_short_config(preset))
        first, second = render_csv(run_scenario(cfg)), render_csv(run_scenario(cfg))
        if first != second:
            differing.append(preset)
    return SuiteResult(
        "csv_determinism", not differing, float(len(differing)), 0.0, {"differing": differing}
    )


SUITES: dict[str, Callable[[CheckContext], SuiteResult]] = {
    "functoriality": suite_functoriality,
    "ad_vs_fd": suite_ad_vs_fd,
    "second_tangent": suite_second_tangent,
    "projection_naturality": suite_projection,
    "monad_laws": suite_monad,
    "testing_quotient": suite_testing_quotient,
    "linear_ode": suite_linear_ode,
    "circular_orbit": suite_circular_orbit,
    "newton_laws": suite_newton_laws,
    "lagrange_hamilton": suite_lagrange_hamilton,
    "covector_roundtrip": suite_covectors,
    "norm_axioms": suite_axioms,
    "chart_transition": suite_charts,
    "csv_determinism": suite_determinism,
}


def run_battery(
    ctx: CheckContext,
    names: Optional[list[str]] = None,
    threads: int = 4,
    show_progress: bool = True,
) -> list[SuiteResult]:
    """Run the selected suites (all by default) and return results in suite order.

    A suite that raises is reported as failed with the exception text.
    """
    selected = names or list(SUITES)
    jobs = [(name, lambda suite=SUITES[name]: suite(ctx)) for name in selected]
    results = []
    for outcome in run_named(jobs, max_workers=threads, show_progress=show_progress):
        if outcome.ok:
            result = outcome.value
        else:
            result = SuiteResult(outcome.name, False, math.nan, math.nan, {"error": str(outcome.error)})
        result.seconds = outcome.seconds
        results.append(result)
    return results
