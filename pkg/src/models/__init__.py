"""
Models package initialization
"""
from .automata import DPA, NBA, BitAlphabet, Lasso
from .formula import And, Equal, Exists, Formula, Less, Member, Not, Role, VarRole
from .game import ParityGame, Player, Solution
from .machine import CMachine, Machine, MachineKind, SCMachine
from .predicate import EMPTY_PREDICATE, UPPredicate
from .spec_file import SpecFile

__all__ = [
    "DPA",
    "NBA",
    "BitAlphabet",
    "Lasso",
    "And",
    "Equal",
    "Exists",
    "Formula",
    "Less",
    "Member",
    "Not",
    "Role",
    "VarRole",
    "ParityGame",
    "Player",
    "Solution",
    "CMachine",
    "Machine",
    "MachineKind",
    "SCMachine",
    "EMPTY_PREDICATE",
    "UPPredicate",
    "SpecFile",
]
