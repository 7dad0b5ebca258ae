"""
Services package initialization
"""
from .automata_service import automata_service
from .determinization import determinizer
from .compiler_service import compiler_service
from .arena_service import arena_service
from .solver_service import solver_service
from .strategy_service import strategy_service
from .predicate_service import predicate_service
from .definability_service import definability_service
from .export_service import export_service
from .spec_service import spec_service
from .synthesis_service import synthesis_service

__all__ = [
    "automata_service",
    "determinizer",
    "compiler_service",
    "arena_service",
    "solver_service",
    "strategy_service",
    "predicate_service",
    "definability_service",
    "export_service",
    "spec_service",
    "synthesis_service",
]
