"""Encoded realizations and invariant equations, with the batch harness."""

from .harness import CLAIMED, EntryReport, Summary, entry_seed, verify_all, verify_entry
from .loader import CatalogEntry, CatalogError, data_dir, load, loads

__all__ = [
    "CLAIMED", "CatalogEntry", "CatalogError", "EntryReport", "Summary",
    "data_dir", "entry_seed", "load", "loads", "verify_all", "verify_entry",
]
