"""Eigenvalues and resonances in the gaps of a periodic Dirac system cut and shifted at the origin."""

import json

from ._disloc import (
    DislocError,
    GapInfo,
    Monodromy,
    Potential,
    State,
    StateKind,
    SurfacePoint,
    b_sheeted,
    band_edges,
    check_sign_lemma,
    dirichlet_point,
    eigenvalue_oracle,
    find_gap,
    fundamental,
    locate_states,
    monodromy,
    neumann_point,
    phi_norm_sq,
    resonance_oracle,
    track_states,
)


def open_gaps(v, lo, hi):
    """Open gaps of the window [lo, hi]."""
    return [g for g in band_edges(v, lo, hi) if not g.closed]


def as_dict(obj):
    """JSON view of a Potential, GapInfo or State."""
    return json.loads(obj.to_json())


__all__ = [name for name in dir() if not name.startswith("_") and name != "json"]
