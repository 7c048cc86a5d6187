"""Approximation thresholds and adaptivity-gap ceilings, per budget k."""

import math

GLOBAL_GAP_CEILING = 2 * math.e / (math.e - 1)  # ~3.164


def greedy_threshold(k: int) -> float:
    """Non-adaptive greedy vs OPT_A: 1/2 (1 - (1 - 1/k)^k)."""
    return 0.5 * (1.0 - (1.0 - 1.0 / k) ** k)


def adaptive_greedy_threshold(k: int) -> float:
    """Adaptive greedy vs OPT_A: 1 - (1 - 1/(2k))^k."""
    return 1.0 - (1.0 - 1.0 / (2 * k)) ** k


def kempe_threshold() -> float:
    return 1.0 - 1.0 / math.e


def gap_ceiling(k: int) -> float:
    """AG(G, k) <= 2 / (1 - (1 - 1/k)^k)."""
    return 2.0 / (1.0 - (1.0 - 1.0 / k) ** k)


def smsm_threshold(k: int) -> float:
    """SMSM greedy vs OPT_A for k >= 2: 1/2 (1 - (1 - 2/k)^k)."""
    if k < 2:
        raise ValueError(f"the SMSM threshold needs k >= 2, got {k}")
    return 0.5 * (1.0 - (1.0 - 2.0 / k) ** k)


LIMITS = {
    "greedy": (greedy_threshold, 0.5 * (1.0 - 1.0 / math.e)),
    "adaptive_greedy": (adaptive_greedy_threshold, 1.0 - 1.0 / math.sqrt(math.e)),
    "smsm": (smsm_threshold, 0.5 * (1.0 - math.exp(-2.0))),
    "gap": (gap_ceiling, GLOBAL_GAP_CEILING),
}


def threshold_limits(k: int = 10 ** 6, tol: float = 1e-3) -> dict[str, dict[str, float]]:
    """Each per-k formula at large k against its asymptotic constant."""
    out = {}
    for name, (formula, limit) in LIMITS.items():
        value = formula(k)
        out[name] = {"value": value, "limit": limit, "ok": abs(value - limit) <= tol}
    return out
