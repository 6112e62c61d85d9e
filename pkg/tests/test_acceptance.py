"""Acceptance gate: oracle agreement, exact identities, optimizer certificates.

Each criterion prints one PASS/FAIL line (run with `pytest -s` to see them
live).  The Monte Carlo criteria use 1e5 trials and take a few minutes
total; everything else is closed-form and fast.
"""
import math
import os

import numpy as np
from secnet import analytic, montecarlo, optimizer
from secnet.cli import main
from secnet.config import NetworkConfig
from secnet.mathcore import exp_derivative, partitions, upsilon
from secnet.optimizer import OptimizerConstants, QoSTargets

TRIALS = int(os.environ.get("SECNET_ACCEPTANCE_TRIALS", "100000"))
WORKERS = min(2, os.cpu_count() or 1)


def _sim(seed: int) -> montecarlo.SimSettings:
    return montecarlo.SimSettings(trials=TRIALS, seed=seed, workers=WORKERS)


def _report(number: int, name: str, ok: bool, detail: str = "") -> None:
    verdict = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {number} [{name}]: {verdict} {detail}".rstrip())
    assert ok, f"criterion {number} ({name}) failed: {detail}"


def test_criterion_1_connection_oracle_agreement():
    failures = []
    worst = 0.0
    seed = 101
    for n_f in (3, 4, 6):
        for lam_f in (1e-4, 1e-3, 5e-3):
            cfg = NetworkConfig(n_f=n_f, lambda_f=lam_f)  # baseline parameter set
            exact = analytic.connection_probability_exact(1.0, cfg)
            lower = analytic.connection_probability_bound(1.0, cfg, "lower")
            upper = analytic.connection_probability_bound(1.0, cfg, "upper")
            est = montecarlo.estimate_fd_connection(1.0, cfg, _sim(seed))
            seed += 1
            tol = max(2 * est.half_width, 0.01)
            gap = abs(exact - est.value)
            worst = max(worst, gap)
            if gap > tol:
                failures.append(f"n_f={n_f} lam_f={lam_f}: |exact-mc|={gap:.4f}>{tol:.4f}")
            if lower > est.value + 2 * est.half_width:
                failures.append(f"n_f={n_f} lam_f={lam_f}: lower bound above mc interval")
            if upper < est.value - 2 * est.half_width:
                failures.append(f"n_f={n_f} lam_f={lam_f}: upper bound below mc interval")
    _report(1, "connection oracle agreement", not failures,
            f"worst |exact-mc|={worst:.4f} " + "; ".join(failures))


def test_criterion_2_secrecy_oracle_agreement():
    failures = []
    worst_mc = worst_approx = 0.0
    seed = 201
    for d_f in (0.5, 1.0, 2.0):
        for lam_e in (1e-4, 1e-3):
            cfg = NetworkConfig(
                p_t=10.0, n_t=1, n_e=4, lambda_f=1e-3, lambda_e=lam_e, d_f=d_f
            )
            exact = analytic.secrecy_outage_exact(1.0, cfg)
            approx = analytic.secrecy_outage_approx(1.0, cfg, "small_df")
            est = montecarlo.estimate_secrecy_outage(1.0, cfg, _sim(seed))
            seed += 1
            tol = max(2 * est.half_width, 0.015)
            gap = abs(exact - est.value)
            worst_mc = max(worst_mc, gap)
            worst_approx = max(worst_approx, abs(exact - approx))
            if gap > tol:
                failures.append(f"d_f={d_f} lam_e={lam_e}: |exact-mc|={gap:.4f}>{tol:.4f}")
            if abs(exact - approx) >= 0.02:
                failures.append(f"d_f={d_f} lam_e={lam_e}: approx gap {abs(exact-approx):.4f}")
    _report(2, "secrecy outage oracle agreement", not failures,
            f"worst |exact-mc|={worst_mc:.4f}, worst |exact-approx|={worst_approx:.4f} "
            + "; ".join(failures))


def test_criterion_3_multi_antenna_oracle_agreement():
    failures = []
    seed = 301
    # multi-stream outage, two streams alongside the swept antenna counts
    for n_e in (2, 4):
        for lam_f in (1e-3, 2e-3):
            cfg = NetworkConfig(
                p_t=10.0, lambda_e=1e-4, lambda_f=lam_f, n_e=n_e,
                n_j=2, n_t=3, n_f=4,
            )
            closed = analytic.secrecy_outage_ma(1.0, cfg)
            est = montecarlo.estimate_secrecy_outage(1.0, cfg, _sim(seed))
            seed += 1
            tol = max(2 * est.half_width, 0.015)
            if abs(closed - est.value) > tol:
                failures.append(
                    f"outage n_e={n_e} lam_f={lam_f}: {abs(closed-est.value):.4f}>{tol:.4f}"
                )
    # connection approximation in its validity region (value > 0.85)
    for n_t, n_j in ((2, 1), (4, 3), (6, 5), (7, 3)):
        cfg = NetworkConfig(p_t=100.0, n_f=8, lambda_f=1e-3, n_t=n_t, n_j=n_j)
        approx = analytic.fd_connection_approx(1.0, cfg)
        if approx <= 0.85:
            continue
        est = montecarlo.estimate_fd_connection(1.0, cfg, _sim(seed))
        seed += 1
        if abs(approx - est.value) > 0.02:
            failures.append(
                f"conn n_t={n_t} n_j={n_j}: |approx-mc|={abs(approx-est.value):.4f}"
            )
    _report(3, "multi-antenna oracle agreement", not failures, "; ".join(failures))


def test_criterion_4_exact_closed_form_identities():
    failures = []
    worst = 0.0
    for lam_e in (1e-4, 1e-3, 1e-2):
        for lam_f in (5e-4, 1e-3, 5e-3):
            for beta_e in (0.5, 1.0, 4.0):
                cfg = NetworkConfig(
                    p_t=10.0, n_t=2, n_j=1, n_f=4, n_e=4,
                    lambda_e=lam_e, lambda_f=lam_f,
                )
                ma = analytic.secrecy_outage_ma(beta_e, cfg)
                sa = analytic.secrecy_outage_approx(beta_e, cfg, "small_df")
                rel = abs(ma - sa) / sa
                worst = max(worst, rel)
                if rel > 1e-12:
                    failures.append(f"single-stream identity rel={rel:.2e}")
    cfg = NetworkConfig(
        p_t=10.0, lambda_e=1e-4, lambda_f=1e-3, n_e=4, n_j=128, n_t=129, n_f=130
    )
    gap = abs(
        analytic.secrecy_outage_ma(1.0, cfg) - analytic.secrecy_outage_ma_limit(1.0, cfg)
    )
    if gap >= 1e-2:
        failures.append(f"stream-limit gap {gap:.3e}")
    _report(4, "exact closed-form identities", not failures,
            f"identity worst rel={worst:.2e}, limit gap={gap:.2e}")


def test_criterion_5_combinatorics():
    failures = []
    counts = [partitions(k).row_count for k in range(1, 9)]
    if counts != [1, 2, 3, 5, 7, 11, 15, 22]:
        failures.append(f"partition counts {counts}")
    if partitions(4).rows != ((4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)):
        failures.append("partition table of 4")

    def brute(m, n, d):
        total = 0.0
        for mask in range(1 << (m - 1)):
            if bin(mask).count("1") != m - n:
                continue
            subset = [l for l in range(1, m) if mask & (1 << (l - 1))]
            prod = 1.0
            for i, l in enumerate(subset, start=1):
                prod *= l - d * (l - i + 1)
            total += prod
        return total

    for m in range(1, 9):
        for n in range(1, m + 1):
            for d in (0.3, 0.5, 4.0 / 7.0):
                if abs(upsilon(m, n, d) - brute(m, n, d)) > 1e-12 * max(1, abs(brute(m, n, d))):
                    failures.append(f"upsilon({m},{n},{d})")

    def central(f, x, m, h):
        if m == 1:
            return (f(x + h) - f(x - h)) / (2 * h)
        if m == 2:
            return (f(x + h) - 2 * f(x) + f(x - h)) / h**2
        if m == 3:
            return (f(x + 2 * h) - 2 * f(x + h) + 2 * f(x - h) - f(x - 2 * h)) / (2 * h**3)
        return (f(x + 2 * h) - 4 * f(x + h) + 6 * f(x) - 4 * f(x - h) + f(x - 2 * h)) / h**4

    f = lambda s: math.exp(-(s**0.5))

    def eta_derivs(s, m):
        out = [-(s**0.5)]
        coeff = -1.0
        for i in range(1, m + 1):
            coeff *= 0.5 - (i - 1)
            out.append(coeff * s ** (0.5 - i))
        return out

    for m in range(1, 5):
        bell = exp_derivative(eta_derivs(1.0, m))
        fd = (4 * central(f, 1.0, m, 0.02) - central(f, 1.0, m, 0.04)) / 3.0
        if abs(bell - fd) / abs(bell) > 1e-5:
            failures.append(f"exp_derivative m={m}")
    _report(5, "combinatorics", not failures, "; ".join(failures))


def test_criterion_6_optimizer_certificates():
    base = dict(p_t=100.0, n_f=8, n_t=6, n_j=1, n_e=8, lambda_e=1e-4)
    rng = np.random.default_rng(606)
    failures = []
    tested = 0
    while tested < 5:
        jitter = lambda x: float(x * rng.uniform(0.7, 1.3))
        cfg = NetworkConfig(
            **{**base, "lambda_e": jitter(1e-4), "p_t": jitter(100.0),
               "lambda_h": jitter(1e-3)}
        )
        targets = QoSTargets(
            sigma=min(jitter(0.9), 0.97), sigma_c=0.9,
            epsilon=min(jitter(0.02), 0.5), t_c=1e-3,
        )
        try:
            consts = OptimizerConstants.from_config(targets, cfg)
        except Exception:
            continue
        if not math.isfinite(consts.lambda_lower) or consts.lambda_lower <= 0:
            continue
        tested += 1
        lo = consts.lambda_lower * (1 + 1e-9)
        grid = np.geomspace(lo, consts.lambda_lower * 1e9, 200)
        signs = [optimizer.stationarity_lhs(l, consts, cfg.alpha) > 0 for l in grid]
        changes = sum(1 for a, b in zip(signs, signs[1:]) if a != b)
        if changes != 1:
            failures.append(f"config {tested}: {changes} sign changes")
        root = optimizer.stationarity_root(consts, cfg.alpha)
        if abs(optimizer.stationarity_lhs(root, consts, cfg.alpha)) >= 1e-8:
            failures.append(f"config {tested}: first-order residual")
        obj = lambda l: optimizer.density_objective(l, consts, cfg.alpha)
        if not (obj(root * (1 - 1e-3)) <= obj(root) >= obj(root * (1 + 1e-3))):
            failures.append(f"config {tested}: not a local max")

        def slope_ratio(l):
            h = l * 1e-6
            return l * (obj(l + h) - obj(l - h)) / (2 * h) / obj(l)

        g_grid = np.geomspace(consts.lambda_lower * 1.01, consts.lambda_lower * 1e4, 100)
        g_vals = [slope_ratio(l) for l in g_grid]
        if not all(a > b for a, b in zip(g_vals, g_vals[1:])):
            failures.append(f"config {tested}: slope ratio not decreasing")
    _report(6, "optimizer certificates", not failures, "; ".join(failures))


def test_criterion_7_trend_reproduction():
    failures = []
    cfg_sa = NetworkConfig(p_t=100.0, n_f=4, n_t=1, n_e=8, lambda_e=1e-2)
    by_eps = [
        optimizer.solve_optimal_density(QoSTargets(sigma=0.6, epsilon=e, t_c=1e-3), cfg_sa).t_s_star
        for e in (0.2, 0.3, 0.45)
    ]
    if not all(a <= b for a, b in zip(by_eps, by_eps[1:])):
        failures.append(f"T_s* vs epsilon {by_eps}")
    by_sigma = [
        optimizer.solve_optimal_density(QoSTargets(sigma=s, epsilon=0.45, t_c=1e-4), cfg_sa).t_s_star
        for s in (0.1, 0.3, 0.5, 0.65, 0.8)
    ]
    peak = int(np.argmax(by_sigma))
    if not (0 < peak < len(by_sigma) - 1):
        failures.append(f"T_s* vs sigma peak at edge {by_sigma}")
    elif not (
        all(a <= b for a, b in zip(by_sigma[: peak + 1], by_sigma[1 : peak + 1]))
        and all(a >= b for a, b in zip(by_sigma[peak:-1], by_sigma[peak + 1 :]))
    ):
        failures.append(f"T_s* vs sigma not rise-fall {by_sigma}")

    fig9 = NetworkConfig(p_t=100.0, n_f=8, n_e=8, n_t=6, n_j=5, lambda_e=1e-4)
    fig9_targets = QoSTargets(sigma=0.9, sigma_c=0.9, epsilon=0.02, t_c=1e-3)
    profile = [
        optimizer.throughput(l, fig9_targets, fig9) for l in np.geomspace(1e-4, 1e-2, 25)
    ]
    peak = int(np.argmax(profile))
    if not (0 < peak < len(profile) - 1):
        failures.append("throughput profile peak at edge")
    else:
        rising, falling = profile[: peak + 1], profile[peak:]
        if not (
            all(a <= b + 1e-15 for a, b in zip(rising, rising[1:]))
            and all(a >= b - 1e-15 for a, b in zip(falling, falling[1:]))
        ):
            failures.append("throughput profile not unimodal")

    by_stream = [
        optimizer.solve_optimal_density(fig9_targets, fig9.replace(n_j=n_j)).t_s_star
        for n_j in (1, 2, 3, 4, 5)
    ]
    if not all(a <= b + 1e-12 for a, b in zip(by_stream, by_stream[1:])):
        failures.append(f"T_s* vs n_j {by_stream}")

    cfg_alpha = NetworkConfig(p_t=10.0, lambda_e=1e-3, lambda_f=1e-3)
    by_alpha = [
        analytic.secrecy_outage_approx(1.0, cfg_alpha.replace(alpha=a), "large_ne")
        for a in (3.0, 3.5, 4.0)
    ]
    if not (by_alpha[0] < by_alpha[1] < by_alpha[2]):
        failures.append(f"envelope vs alpha {by_alpha}")
    _report(7, "trend reproduction", not failures, "; ".join(failures))


def test_criterion_8_cli_determinism(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    code_a = main(["figure", "2", "--seed", "7", "--trials", "20000",
                   "--workers", "1", "--no-plot", "--out", str(a)])
    code_b = main(["figure", "2", "--seed", "7", "--trials", "20000",
                   "--workers", "2", "--no-plot", "--out", str(b)])
    ok = code_a == code_b == 0 and a.read_bytes() == b.read_bytes()
    _report(8, "CLI determinism", ok,
            f"exit codes ({code_a},{code_b}), bytes equal={a.read_bytes() == b.read_bytes()}")
