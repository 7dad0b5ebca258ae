"""
Text and DOT renderings of automata, arenas, solutions and machines
"""
import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from graphviz import Digraph

from ..core.exceptions import MachineFormatError, WidthMismatchError
from ..models.automata import DPA, BitAlphabet
from ..models.game import ParityGame, Player, Solution
from ..models.machine import CMachine, Machine, MachineKind, SCMachine

logger = logging.getLogger(__name__)

GRAPH_ATTRS = [("rankdir", "LR"), ("ranksep", "0.6"), ("nodesep", "0.4")]


def _digraph(name: str) -> Digraph:
    return Digraph(
        name=name,
        graph_attr=GRAPH_ATTRS,
        node_attr=[("shape", "circle")],
        edge_attr=[("fontname", "mono")],
        engine="dot",
    )


class ExportService:
    """Service for artifact formats"""

    # Automata

    def dpa_to_text(self, a: DPA) -> str:
        alphabet = BitAlphabet(a.width)
        lines = [f"dpa {a.width} {a.max_color}"]
        for q in range(a.num_states):
            for letter in alphabet.letters():
                lines.append(f"{q} {alphabet.to_bits(letter) or '-'} {a.step(q, letter)}")
        lines.extend(f"col {q} {a.colors[q]}" for q in range(a.num_states))
        lines.append(f"init {a.initial}")
        return "\n".join(lines) + "\n"

    def dpa_from_text(self, text: str) -> DPA:
        rows = [line.split() for line in text.splitlines() if line.strip() and not line.startswith("#")]
        if not rows or rows[0][0] != "dpa" or len(rows[0]) != 3:
            raise MachineFormatError("automaton text must start with 'dpa <width> <max color>'")
        try:
            width, max_color = int(rows[0][1]), int(rows[0][2])
        except ValueError:
            raise MachineFormatError(f"bad automaton header: {' '.join(rows[0])}")
        alphabet = BitAlphabet(width)
        moves: Dict[Tuple[int, int], int] = {}
        colors: Dict[int, int] = {}
        initial: Optional[int] = None
        for number, row in enumerate(rows[1:], start=2):
            try:
                if row[0] == "col" and len(row) == 3:
                    colors[int(row[1])] = int(row[2])
                elif row[0] == "init" and len(row) == 2:
                    initial = int(row[1])
                elif len(row) == 3:
                    letter = alphabet.from_bits("" if row[1] == "-" else row[1])
                    moves[(int(row[0]), letter)] = int(row[2])
                else:
                    raise MachineFormatError(f"line {number}: unrecognized entry '{' '.join(row)}'")
            except (ValueError, WidthMismatchError) as e:
                raise MachineFormatError(f"line {number}: {e}")

        num_states = len(colors)
        if set(colors) != set(range(num_states)):
            raise MachineFormatError("every state 0..k-1 needs exactly one color line")
        if initial is None:
            raise MachineFormatError("missing 'init' line")
        if any(c > max_color for c in colors.values()):
            raise MachineFormatError(f"color above the declared maximum {max_color}")
        try:
            table = tuple(
                tuple(moves[(q, letter)] for letter in alphabet.letters()) for q in range(num_states)
            )
            return DPA(width, num_states, initial, table, tuple(colors[q] for q in range(num_states)))
        except KeyError as e:
            raise MachineFormatError(f"missing transition for state and letter {e.args[0]}")
        except ValueError as e:
            raise MachineFormatError(str(e))

    def dpa_to_dot(self, a: DPA, track_names: Optional[List[str]] = None) -> str:
        alphabet = BitAlphabet(a.width)
        dot = _digraph("DPA")
        dot.node("init", "", shape="point")
        for q in range(a.num_states):
            shape = "doublecircle" if a.colors[q] % 2 == 0 else "circle"
            dot.node(str(q), f"{q}\\ncol {a.colors[q]}", shape=shape)
        dot.edge("init", str(a.initial))
        header = "".join(name[0] for name in track_names) if track_names else ""
        for q in range(a.num_states):
            grouped: Dict[int, List[str]] = {}
            for letter in alphabet.letters():
                grouped.setdefault(a.step(q, letter), []).append(alphabet.to_bits(letter))
            for target, letters in sorted(grouped.items()):
                label = ",".join(letters) if a.width else "*"
                if header:
                    label = f"{header}: {label}"
                dot.edge(str(q), str(target), label)
        return dot.source

    # Games

    def arena_to_dot(self, g: ParityGame, s: Optional[Solution] = None) -> str:
        dot = _digraph("Arena")
        for v in g.vertices:
            shape = "box" if g.owners[v] is Player.I else "circle"
            label = f"{g.name(v)}\\ncol {g.colors[v]}"
            attrs = {"shape": shape}
            if s is not None:
                attrs["style"] = "filled"
                attrs["fillcolor"] = "lightblue" if s.winner[v] is Player.II else "lightpink"
            dot.node(str(v), label, **attrs)
        for v in g.vertices:
            chosen = s.strategy(s.winner[v]).get(v) if s is not None else None
            for label in (0, 1):
                style = "bold" if chosen == label else "solid"
                dot.edge(str(v), str(g.step(v, label)), str(label), style=style)
        return dot.source

    def solution_to_text(self, g: ParityGame, s: Solution) -> str:
        """One line per vertex: 'vertex winner [edge-label]'"""
        lines = []
        for v in g.vertices:
            winner = s.winner[v]
            choice = s.strategy(winner).get(v)
            lines.append(f"{v} {winner.value}" + (f" {choice}" if choice is not None else ""))
        return "\n".join(lines) + "\n"

    # Machines

    def machine_to_text(self, m: Machine) -> str:
        lines = [f"{m.kind.value} {m.num_states} {m.initial}"]
        for q in range(m.num_states):
            for a in (0, 1):
                lines.append(f"{q} {a} / {m.output(q, a)} {m.step(q, a)}")
        return "\n".join(lines) + "\n"

    def machine_from_text(self, text: str) -> Machine:
        rows = [line.split() for line in text.splitlines() if line.strip() and not line.startswith("#")]
        if not rows or len(rows[0]) != 3:
            raise MachineFormatError("machine table must start with '<kind> <states> <initial>'")
        try:
            kind = MachineKind(rows[0][0])
            num_states, initial = int(rows[0][1]), int(rows[0][2])
        except ValueError:
            raise MachineFormatError(f"bad machine header: {' '.join(rows[0])}")

        outputs: Dict[Tuple[int, int], int] = {}
        targets: Dict[Tuple[int, int], int] = {}
        for number, row in enumerate(rows[1:], start=2):
            if len(row) != 5 or row[2] != "/":
                raise MachineFormatError(f"line {number}: expected 'state input / output nextstate'")
            try:
                q, a, b, nxt = int(row[0]), int(row[1]), int(row[3]), int(row[4])
            except ValueError:
                raise MachineFormatError(f"line {number}: non-numeric entry")
            if (q, a) in targets:
                raise MachineFormatError(f"line {number}: duplicate entry for state {q} input {a}")
            outputs[(q, a)], targets[(q, a)] = b, nxt

        try:
            transitions = tuple(tuple(targets[(q, a)] for a in (0, 1)) for q in range(num_states))
            if kind is MachineKind.CAUSAL:
                table = tuple(tuple(outputs[(q, a)] for a in (0, 1)) for q in range(num_states))
                return CMachine(num_states, initial, transitions, table)
            if any(outputs[(q, 0)] != outputs[(q, 1)] for q in range(num_states)):
                raise MachineFormatError("strongly causal machine output must not depend on the input bit")
            return SCMachine(num_states, initial, transitions, tuple(outputs[(q, 0)] for q in range(num_states)))
        except KeyError as e:
            raise MachineFormatError(f"missing entry for state and input {e.args[0]}")
        except ValueError as e:
            raise MachineFormatError(str(e))

    def machine_to_dot(self, m: Machine) -> str:
        dot = _digraph("CMachine" if isinstance(m, CMachine) else "SCMachine")
        dot.node("init", "", shape="point")
        for q in range(m.num_states):
            label = f"{q} / {m.output(q, 0)}" if isinstance(m, SCMachine) else str(q)
            dot.node(str(q), label)
        dot.edge("init", str(m.initial))
        for q in range(m.num_states):
            for a in (0, 1):
                label = str(a) if isinstance(m, SCMachine) else f"{a} / {m.output(q, a)}"
                dot.edge(str(q), str(m.step(q, a)), label)
        return dot.source

    def write(self, directory: str, name: str, content: str) -> Path:
        path = Path(directory)
        path.mkdir(parents=True, exist_ok=True)
        target = path / name
        target.write_text(content, encoding="utf-8")
        logger.info(f"Wrote {target}")
        return target


# Global export service instance
export_service = ExportService()
