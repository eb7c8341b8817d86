from __future__ import annotations

import math


def bbm_constant(n, p):
    """``K_{n,p} = 2 Gamma((p+1)/2) pi^((n-1)/2) / Gamma((n+p)/2)``, via log-Gamma."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if p < 1:
        raise ValueError("p must be >= 1")
    log = math.log(2.0) + math.lgamma((p + 1) / 2.0) + 0.5 * (n - 1) * math.log(math.pi) - math.lgamma((n + p) / 2.0)
    return math.exp(log)
