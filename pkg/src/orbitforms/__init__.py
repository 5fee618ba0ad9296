"""Numerical engine for commuting Lax flows and Lagrangian multiforms on
coadjoint orbits: the open Toda chain under two r-matrix structures and the
rational Gaudin model, plus a verification harness for the structural
identities (Yang-Baxter residuals, involution, isospectrality, closure, the
off-shell double-zero identity, and the QR-factorisation closed form)."""

__version__ = "0.1.0"

from .dialgebra import AKS_TODA, CARTAN_TODA, GAUDIN_PARTIAL_FRACTION, ROperator
from .gaudin import GaudinOrbit, RationalLax
from .harness import CampaignConfig, VerificationReport, run_suite
from .models import GaudinModel, TodaAksModel, TodaCartanModel
from .multitime import JetPoint, MultiTimePath, Trajectory
from .toda_aks import CanonicalQP, CanonicalUB, FlaschkaPoint
from .toda_cartan import WZPoint

__all__ = [
    "AKS_TODA",
    "CARTAN_TODA",
    "GAUDIN_PARTIAL_FRACTION",
    "CampaignConfig",
    "CanonicalQP",
    "CanonicalUB",
    "FlaschkaPoint",
    "GaudinModel",
    "GaudinOrbit",
    "JetPoint",
    "MultiTimePath",
    "ROperator",
    "RationalLax",
    "TodaAksModel",
    "TodaCartanModel",
    "Trajectory",
    "VerificationReport",
    "WZPoint",
    "run_suite",
    "__version__",
]
