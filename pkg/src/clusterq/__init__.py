"""Exact verification toolkit for quantum cluster seeds, their mutations,
quantum dilogarithm identities and the phase constants of the mutation
intertwiners."""
from __future__ import annotations

__version__ = "0.1.0"
