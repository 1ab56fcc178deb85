"""Bounded-innovation synthetic pair generator and verification harnesses.

The generator simulates a mean-reverting spread s(k) over a driving random
walk w(k) = log p1(k), with bounded uniform innovations:

    s(k+1) = (1 - theta) s(k) + sigma_s u(k),   u ~ U[-1, 1]
    w(k+1) = w(k) + sigma_w v(k),               v ~ U[-1, 1]
    log p2(k) = beta_true w(k) + mu_true + s(k)

Bounded innovations keep every one-period relative return inside a hard cap:
|s(k)| never exceeds B = max(|s0|, sigma_s / theta), so each log increment is
bounded and the per-period return of each price stays within gamma_cap
whenever the scales satisfy the feasibility inequalities checked at
construction. For this spread the conditional mean pull is exactly
E[sign(s) (s(k+1) - s(k)) | s(k)] = -theta |s(k)|, so theta is the true
reversion rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import stats

from . import kernels
from .domain import DomainError, LengthError, PricePoint, PriceSeries
from .spread import CointegrationSpread, spread_gradient
from .trading import threshold_approx, threshold_exact

THRESHOLD_MODES = ("approx", "exact")


@dataclass(frozen=True)
class OUPairSpec:
    """Parameters of the synthetic pair generator.

    Construction validates feasibility: worst-case log increments must fit
    inside log(1 + gamma_cap) for both prices, otherwise some path could
    break the return cap. Infeasible scales raise DomainError with the
    offending bound in the message.

    p0.p1 seeds the driving log-price walk. p0.p2 is a reference price for
    evaluation points (thresholds, lemma band centers); the generated p2(0)
    itself is pinned by the identity log p2 = beta_true log p1 + mu_true + s
    and generally differs from p0.p2 unless mu_true is chosen to match.
    """

    theta: float
    sigma_s: float
    sigma_w: float
    beta_true: float
    mu_true: float = 0.0
    gamma_cap: float = 0.05
    s0: float = 0.0
    p0: PricePoint = field(default_factory=lambda: PricePoint(100.0, 50.0))
    seed: int = 0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.theta) and 0.0 < self.theta < 1.0):
            raise DomainError(f"theta must lie in (0, 1), got {self.theta!r}")
        for name, x in (("sigma_s", self.sigma_s), ("sigma_w", self.sigma_w)):
            if not (math.isfinite(x) and x >= 0.0):
                raise DomainError(f"{name} must be finite and non-negative, got {x!r}")
        for name, x in (("beta_true", self.beta_true), ("mu_true", self.mu_true), ("s0", self.s0)):
            if not math.isfinite(x):
                raise DomainError(f"{name} must be finite, got {x!r}")
        if not (math.isfinite(self.gamma_cap) and 0.0 < self.gamma_cap < 1.0):
            raise DomainError(f"gamma_cap must lie in (0, 1), got {self.gamma_cap!r}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or self.seed < 0:
            raise DomainError(f"seed must be a non-negative integer, got {self.seed!r}")
        budget = self.innovation_budget
        b1, b2 = self.log_increment_bounds
        if b1 > budget or b2 > budget:
            raise DomainError(
                "infeasible scales: worst-case log increments "
                f"(p1: {b1:.6g}, p2: {b2:.6g}) exceed log1p(gamma_cap) = {budget:.6g}; "
                "reduce sigma_s / sigma_w or raise gamma_cap"
            )

    @property
    def spread_bound(self) -> float:
        """B with |s(k)| <= B for all k."""
        drift_cap = self.sigma_s / self.theta
        return max(abs(self.s0), drift_cap)

    @property
    def innovation_budget(self) -> float:
        """Largest admissible per-period |log increment|, with safety slack."""
        return math.log1p(self.gamma_cap) * (1.0 - 1e-9)

    @property
    def log_increment_bounds(self) -> tuple[float, float]:
        """Worst-case |delta log p1| and |delta log p2| per period."""
        b1 = self.sigma_w
        b2 = abs(self.beta_true) * self.sigma_w + self.theta * self.spread_bound + self.sigma_s
        return b1, b2

    @classmethod
    def sized_for_cap(
        cls,
        theta: float,
        beta_true: float,
        mu_true: float = 0.0,
        gamma_cap: float = 0.05,
        s0: float = 0.0,
        p0: PricePoint | None = None,
        seed: int = 0,
        spread_share: float = 0.6,
        utilization: float = 0.9,
    ) -> "OUPairSpec":
        """Largest sigma_s / sigma_w pair that provably respects gamma_cap.

        spread_share splits the log-increment budget between the spread and
        the driving walk; utilization leaves headroom below the cap.
        """
        if not (0.0 < spread_share < 1.0):
            raise DomainError(f"spread_share must lie in (0, 1), got {spread_share!r}")
        if not (0.0 < utilization <= 1.0):
            raise DomainError(f"utilization must lie in (0, 1], got {utilization!r}")
        budget = math.log1p(gamma_cap) * utilization * (1.0 - 1e-9)
        sigma_s = spread_share * budget / 2.0
        sigma_w = (1.0 - spread_share) * budget / max(1.0, abs(beta_true))
        if theta > 0.0 and abs(s0) > sigma_s / theta:
            raise DomainError(
                f"|s0| = {abs(s0)!r} exceeds the stationary bound sigma_s / theta; "
                "start the spread closer to zero or lower theta"
            )
        return cls(
            theta=theta,
            sigma_s=sigma_s,
            sigma_w=sigma_w,
            beta_true=beta_true,
            mu_true=mu_true,
            gamma_cap=gamma_cap,
            s0=s0,
            p0=p0 if p0 is not None else PricePoint(100.0, 50.0),
            seed=seed,
        )

    def with_seed(self, seed: int) -> "OUPairSpec":
        return replace(self, seed=seed)


def trial_generators(seed: int, trials: int) -> list[np.random.Generator]:
    """Independent per-trial RNG streams.

    Trial t uses numpy's default generator seeded with child t of
    SeedSequence(seed) (spawn key (t,)). This is the reproducibility
    contract: same (seed, trials) always yields the same streams.
    """
    if trials < 1:
        raise DomainError(f"trials must be positive, got {trials}")
    return [np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(trials)]


def _simulate(spec: OUPairSpec, length: int, rng: np.random.Generator):
    """One path. Returns (s, w, p1, p2) arrays of the given length."""
    uv = rng.uniform(-1.0, 1.0, size=(2, length - 1))
    s, w = kernels.ou_recursion(
        uv[0], uv[1], spec.theta, spec.sigma_s, spec.sigma_w, spec.s0, math.log(spec.p0.p1)
    )
    p1 = np.exp(w)
    p2 = np.exp(spec.beta_true * w + (spec.mu_true + s))
    return s, w, p1, p2


def generate_pair(spec: OUPairSpec, length: int) -> PriceSeries:
    """Generate a synthetic price series of the given length from spec.seed."""
    if length < 2:
        raise LengthError(f"length must be at least 2, got {length}")
    rng = np.random.default_rng(np.random.SeedSequence(spec.seed))
    _, _, p1, p2 = _simulate(spec, length, rng)
    dates = tuple(f"{k:08d}" for k in range(length))
    return PriceSeries(dates, p1, p2)


@dataclass(frozen=True)
class TheoremSummary:
    """Aggregate result of the expected-growth Monte Carlo run."""

    trials: int
    periods: int
    mode: str
    tau: float
    tau_exact: float
    tau_approx: float
    eta_assumed: float
    gamma_assumed: float
    trade_events: int
    mean_dv: float | None
    p_value: float | None
    bin_edges: tuple[float, ...] | None = None
    bin_counts: tuple[int, ...] | None = None
    bin_mean_dv: tuple[float, ...] | None = None

    def confirms(self, alpha: float = 0.001) -> bool:
        """True when traded profits are positive and significant at alpha."""
        return (
            self.trade_events > 0
            and self.mean_dv is not None
            and self.mean_dv > 0.0
            and self.p_value is not None
            and self.p_value < alpha
        )


def _one_sided_p(count: int, total: float, totsq: float) -> tuple[float | None, float | None]:
    """Mean and one-sided p-value for H0: mean <= 0, from running sums."""
    if count == 0:
        return None, None
    mean = total / count
    if count == 1:
        return mean, None
    var = (totsq - count * mean * mean) / (count - 1)
    if var <= 0.0:
        return mean, (0.0 if mean > 0.0 else 1.0)
    t_stat = mean / math.sqrt(var / count)
    return mean, float(stats.t.sf(t_stat, count - 1))


def verify_theorem(
    spec: OUPairSpec,
    trials: int = 10_000,
    periods: int = 250,
    eta_assumed: float | None = None,
    gamma_assumed: float | None = None,
    mode: str = "approx",
    leverage: float = 1.0,
    initial_value: float = 10_000.0,
    collect_bins: int = 0,
) -> TheoremSummary:
    """Monte Carlo check that traded periods have positive expected profit.

    Each trial generates an independent path and runs the threshold rule with
    the true (beta, mu) spread. eta_assumed defaults to theta (the exact
    reversion rate of this generator) and gamma_assumed to gamma_cap. Both
    threshold variants are price-independent for the log-linear family, so
    they are evaluated once at p0. Per-event profits are pooled across trials
    and tested one-sided against mean <= 0.
    """
    if trials < 1:
        raise DomainError(f"trials must be positive, got {trials}")
    if periods < 2:
        raise DomainError(f"periods must be at least 2, got {periods}")
    if mode not in THRESHOLD_MODES:
        raise DomainError(f"mode must be one of {THRESHOLD_MODES}, got {mode!r}")
    eta = spec.theta if eta_assumed is None else eta_assumed
    gamma = spec.gamma_cap if gamma_assumed is None else gamma_assumed

    model = CointegrationSpread(spec.beta_true, spec.mu_true)
    tau_e = threshold_exact(model, spec.p0, gamma, eta)
    tau_a = threshold_approx(model, spec.p0, gamma, eta)
    tau = tau_a if mode == "approx" else tau_e

    dv_buf = np.empty(periods)
    sabs_buf = np.empty(periods)
    count = 0
    total = 0.0
    totsq = 0.0

    use_bins = collect_bins > 0 and math.isfinite(tau)
    if use_bins:
        hi = max(spec.spread_bound, tau * (1.0 + 1e-9))
        edges = np.linspace(tau, hi, collect_bins + 1)
        bin_sums = np.zeros(collect_bins)
        bin_counts = np.zeros(collect_bins, dtype=np.int64)

    for rng in trial_generators(spec.seed, trials):
        s, _, p1, p2 = _simulate(spec, periods, rng)
        n_ev, _ = kernels.trade_scan(
            p1, p2, s, spec.beta_true, tau, leverage, initial_value, dv_buf, sabs_buf
        )
        if n_ev:
            dv = dv_buf[:n_ev]
            count += n_ev
            total += float(np.sum(dv))
            totsq += float(np.dot(dv, dv))
            if use_bins:
                idx = np.clip(np.digitize(sabs_buf[:n_ev], edges) - 1, 0, collect_bins - 1)
                bin_sums += np.bincount(idx, weights=dv, minlength=collect_bins)
                bin_counts += np.bincount(idx, minlength=collect_bins)

    mean, p_value = _one_sided_p(count, total, totsq)
    bins_kw = {}
    if use_bins:
        means = tuple(
            float(bin_sums[i] / bin_counts[i]) if bin_counts[i] else math.nan
            for i in range(collect_bins)
        )
        bins_kw = dict(
            bin_edges=tuple(float(e) for e in edges),
            bin_counts=tuple(int(c) for c in bin_counts),
            bin_mean_dv=means,
        )
    return TheoremSummary(
        trials=trials,
        periods=periods,
        mode=mode,
        tau=tau,
        tau_exact=tau_e,
        tau_approx=tau_a,
        eta_assumed=eta,
        gamma_assumed=gamma,
        trade_events=count,
        mean_dv=mean,
        p_value=p_value,
        **bins_kw,
    )


@dataclass(frozen=True)
class LemmaSummary:
    """Aggregate result of the approximation-error Monte Carlo run."""

    samples: int
    gamma: float
    max_violation: float
    max_remainder: float
    max_ratio: float


def verify_lemma(
    spec: OUPairSpec,
    samples: int = 10_000,
    gamma: float | None = None,
    band: float = 1.0,
) -> LemmaSummary:
    """Monte Carlo check of the curvature bound on the linearization error.

    Draws price points log-uniformly within exp(+-band) of p0 and admissible
    displacements inside the gamma box, then compares the exact first-order
    remainder of the spread against the worst-case curvature bound. The bound
    equals eta * tau_exact for any positive eta, which cancels to a rate-free
    quantity; it is evaluated here via tau_exact at eta = 1. The four box
    corners of each point are always checked alongside the random draw.
    """
    if samples < 1:
        raise DomainError(f"samples must be positive, got {samples}")
    g = spec.gamma_cap if gamma is None else gamma
    if not (0.0 < g < 1.0):
        raise DomainError(f"gamma must lie in (0, 1), got {g!r}")
    model = CointegrationSpread(spec.beta_true, spec.mu_true)
    rng = np.random.default_rng(np.random.SeedSequence(spec.seed))
    logs = rng.uniform(-band, band, size=(2, samples))
    disp = rng.uniform(-g, g, size=(2, samples))
    corners = ((g, g), (g, -g), (-g, g), (-g, -g))

    max_violation = -math.inf
    max_remainder = 0.0
    max_ratio = 0.0
    for i in range(samples):
        p = PricePoint(spec.p0.p1 * math.exp(logs[0, i]), spec.p0.p2 * math.exp(logs[1, i]))
        bound = threshold_exact(model, p, g, eta=1.0)
        s_p = model.value(p)
        grad = spread_gradient(model, p)
        trials = ((float(disp[0, i]), float(disp[1, i])),) + corners
        for t1, t2 in trials:
            d1 = p.p1 * t1
            d2 = p.p2 * t2
            q = PricePoint(p.p1 + d1, p.p2 + d2)
            remainder = abs(model.value(q) - s_p - (float(grad[0]) * d1 + float(grad[1]) * d2))
            max_violation = max(max_violation, remainder - bound)
            max_remainder = max(max_remainder, remainder)
            if bound > 0.0:
                max_ratio = max(max_ratio, remainder / bound)
    return LemmaSummary(
        samples=samples,
        gamma=g,
        max_violation=max_violation,
        max_remainder=max_remainder,
        max_ratio=max_ratio,
    )
