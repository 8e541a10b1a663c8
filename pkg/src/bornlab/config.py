"""Centralized numerical tolerances.

Every validator in the library reads from a single Tolerances record so
acceptance thresholds can be tuned in one place (or overridden per call).
"""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    hermitian: float = 1e-12
    unitary: float = 1e-10
    projector: float = 1e-10
    projector_eig: float = 1e-8
    density_trace: float = 1e-12
    density_psd: float = -1e-10
    commute: float = 1e-10
    resolution: float = 1e-10
    subspace: float = 1e-8
    frame_sum: float = 1e-8
    frame_value: float = 1e-10
    context_match: float = 1e-8
    context_agree: float = 1e-6
    effect_psd: float = -1e-10
    effect_closure: float = 1e-10
    sector_cluster: float = 1e-6
    prob_clamp: float = 1e-12
    branch_cut: float = 1e-8

    def override(self, **kwargs: float) -> "Tolerances":
        return replace(self, **kwargs)


DEFAULT = Tolerances()
