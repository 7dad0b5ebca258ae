"""
Finite-state operators on bit streams.

A CMachine reads the current input bit before emitting, so its output at
time t depends on inputs 0..t (causal). An SCMachine emits from its state
alone, on entering it, so its output at time t depends on inputs 0..t-1
(strongly causal).
"""
import enum
from dataclasses import dataclass
from typing import Tuple


class MachineKind(str, enum.Enum):
    CAUSAL = "cmachine"
    STRONGLY_CAUSAL = "scmachine"


@dataclass(frozen=True)
class Machine:
    """Deterministic total machine over input bits; transitions[q][a] is the next state"""
    num_states: int
    initial: int
    transitions: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        if self.num_states < 1:
            raise ValueError("a machine needs at least one state")
        if not 0 <= self.initial < self.num_states:
            raise ValueError("initial state out of range")
        if len(self.transitions) != self.num_states:
            raise ValueError("transition table does not cover every state")
        for row in self.transitions:
            if len(row) != 2 or any(not 0 <= q < self.num_states for q in row):
                raise ValueError("transition table must map each state and bit to a state")

    def step(self, state: int, bit: int) -> int:
        return self.transitions[state][bit]

    def output(self, state: int, bit: int) -> int:
        raise NotImplementedError

    @property
    def kind(self) -> MachineKind:
        raise NotImplementedError


@dataclass(frozen=True)
class CMachine(Machine):
    """outputs[q][a] is emitted when bit a is read in state q"""
    outputs: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        super().__post_init__()
        if len(self.outputs) != self.num_states or any(
            len(row) != 2 or any(b not in (0, 1) for b in row) for row in self.outputs
        ):
            raise ValueError("output table must map each state and bit to a bit")

    def output(self, state: int, bit: int) -> int:
        return self.outputs[state][bit]

    @property
    def kind(self) -> MachineKind:
        return MachineKind.CAUSAL


@dataclass(frozen=True)
class SCMachine(Machine):
    """outputs[q] is emitted on entering q, including the initial state at time 0"""
    outputs: Tuple[int, ...] = ()

    def __post_init__(self):
        super().__post_init__()
        if len(self.outputs) != self.num_states or any(b not in (0, 1) for b in self.outputs):
            raise ValueError("output table must map each state to a bit")

    def output(self, state: int, bit: int = 0) -> int:
        return self.outputs[state]

    @property
    def kind(self) -> MachineKind:
        return MachineKind.STRONGLY_CAUSAL
