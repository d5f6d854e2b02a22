"""Transfer matrices of rational spin chains, their determinant identities and the boson-fermion picture."""

from .combinatorics import ChargedPartition, conjugate, straighten
from .transfer import ChainContext, TransferFamily, transfer_for

__all__ = ["ChainContext", "ChargedPartition", "TransferFamily", "conjugate", "straighten", "transfer_for"]
