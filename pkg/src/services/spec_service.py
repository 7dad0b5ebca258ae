"""
Specification file reading.

    # comment
    let Copy = all t. (in(Y,t) <-> in(X,t))
    formula: Copy &
        ex t. in(Y,t)
    input: X
    output: Y
    param P = 01;10
    option state_cap = 50000
    option seed = 7

Indented lines continue the preceding formula or let entry.
"""
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from pydantic import ValidationError

from ..core.exceptions import SpecFileError
from ..models.formula import Formula, Role, VarRole, bound_set_names
from ..models.predicate import UPPredicate
from ..models.spec_file import MacroDefinition, SourceText, SpecFile
from .formula_parser import parse

logger = logging.getLogger(__name__)

_ROLE = re.compile(r"^(?P<key>formula|input|output)\s*:\s*(?P<value>.*)$")
_PARAM = re.compile(r"^param\s+(?P<name>\S+)\s*=\s*(?P<value>.*?)\s*$")
_LET = re.compile(r"^let\s+(?P<name>\S+)\s*=\s*(?P<value>.*)$")
_OPTION = re.compile(r"^option\s+(?P<name>\w+)\s*=\s*(?P<value>\S+)\s*$")

OPTIONS = ("state_cap", "seed")
DEFAULT_PARAM_NAME = "P"
DEFAULT_PARAM_LITERAL = ";0"


@dataclass
class SynthesisProblem:
    """A parsed and checked specification ready for the pipeline"""
    formula: Formula
    input_name: str
    output_name: str
    param_name: str
    predicate: UPPredicate
    seed: Optional[int] = None
    state_cap: Optional[int] = None

    @property
    def roles(self) -> Tuple[VarRole, ...]:
        """The three track roles, then set variables quantified inside the formula"""
        auxiliary = sorted(bound_set_names(self.formula))
        return (
            VarRole(self.input_name, Role.INPUT),
            VarRole(self.output_name, Role.OUTPUT),
            VarRole(self.param_name, Role.PARAMETER),
        ) + tuple(VarRole(name, Role.AUXILIARY) for name in auxiliary)


@dataclass
class Sentence:
    formula: Formula
    params: Dict[str, UPPredicate] = field(default_factory=dict)


@dataclass
class _Entry:
    """A multi-line text entry under construction"""
    kind: str
    name: str
    line: int
    column: int
    lines: List[str]

    def source(self) -> SourceText:
        return SourceText(text="\n".join(self.lines), line=self.line, column=self.column)


class SpecService:
    """Service reading spec files and sentence files"""

    def read_spec(self, text: str) -> SpecFile:
        fields: Dict[str, object] = {"params": {}, "macros": []}
        entries = self._entries(text, fields)
        formulas = [e for e in entries if e.kind == "formula"]
        if len(formulas) != 1:
            raise SpecFileError(f"expected exactly one 'formula:' line, found {len(formulas)}")
        fields["formula"] = formulas[0].source()
        fields["macros"] = [
            MacroDefinition(name=e.name, body=e.source()) for e in entries if e.kind == "let"
        ]
        for role in ("input", "output"):
            if role not in fields:
                raise SpecFileError(f"missing '{role}:' line")
        try:
            return SpecFile(**fields)
        except ValidationError as e:
            raise SpecFileError(f"invalid spec file: {e.errors()[0]['msg']}")

    def load(self, path: str) -> SpecFile:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise SpecFileError(f"cannot read spec file {path}: {e.strerror}")
        return self.read_spec(text)

    def build_problem(self, spec: SpecFile) -> SynthesisProblem:
        """Parse macros and formula against the declared roles; at most one parameter"""
        if len(spec.params) > 1:
            raise SpecFileError(f"synthesis takes at most one parameter, got {len(spec.params)}")
        if spec.params:
            param_name, literal = next(iter(spec.params.items()))
        else:
            taken = {spec.input, spec.output}
            param_name = next(
                name for name in (f"{DEFAULT_PARAM_NAME}{i}" if i else DEFAULT_PARAM_NAME for i in range(3))
                if name not in taken
            )
            literal = DEFAULT_PARAM_LITERAL
        macros = self._macros(spec.macros)
        declared = [spec.input, spec.output] + list(spec.params)
        source = spec.formula
        formula = parse(source.text, declared=declared, macros=macros, line=source.line, column=source.column)
        logger.info(
            f"Loaded specification with input {spec.input}, output {spec.output}, "
            f"parameter {param_name}={literal}"
        )
        return SynthesisProblem(
            formula,
            spec.input,
            spec.output,
            param_name,
            UPPredicate.from_literal(literal),
            seed=spec.seed,
            state_cap=spec.state_cap,
        )

    def read_sentence(self, text: str, bindings: Optional[Dict[str, str]] = None) -> Sentence:
        """
        A sentence file is either plain formula text or spec-file syntax
        with a 'formula:' line. Bindings override 'param' lines.
        """
        fields: Dict[str, object] = {"params": {}}
        entries = self._entries(text, fields, allow_bare=True)
        formulas = [e for e in entries if e.kind == "formula"]
        if len(formulas) != 1:
            raise SpecFileError(f"expected one formula, found {len(formulas)}")
        params: Dict[str, str] = dict(fields["params"])
        params.update(bindings or {})
        macros = self._macros(
            [MacroDefinition(name=e.name, body=e.source()) for e in entries if e.kind == "let"]
        )
        source = formulas[0].source()
        formula = parse(source.text, macros=macros, line=source.line, column=source.column)
        return Sentence(formula, {name: UPPredicate.from_literal(v) for name, v in params.items()})

    def parse_binding(self, binding: str) -> Tuple[str, str]:
        """'P=u;v' as given on the command line"""
        name, sep, literal = binding.partition("=")
        if not sep or not name.strip():
            raise SpecFileError(f"expected NAME=prefix;period, got '{binding}'")
        UPPredicate.from_literal(literal)
        return name.strip(), literal.strip()

    def _macros(self, definitions: List[MacroDefinition]) -> Dict[str, Formula]:
        macros: Dict[str, Formula] = {}
        for definition in definitions:
            if definition.name in macros:
                raise SpecFileError(f"macro '{definition.name}' defined twice")
            body = definition.body
            macros[definition.name] = parse(body.text, macros=macros, line=body.line, column=body.column)
        return macros

    def _entries(self, text: str, fields: Dict[str, object], allow_bare: bool = False) -> List[_Entry]:
        entries: List[_Entry] = []
        current: Optional[_Entry] = None
        bare: Optional[_Entry] = None
        for number, raw in enumerate(text.splitlines(), start=1):
            stripped = raw.strip()
            if not stripped or stripped.startswith("#"):
                if current is not None:
                    current.lines.append("")
                continue
            if raw[0] in " \t" and current is not None:
                current.lines.append(raw)
                continue
            current = None

            role = _ROLE.match(stripped)
            if role:
                key = role.group("key")
                if key == "formula":
                    column = raw.index(stripped) + role.start("value") + 1
                    current = _Entry("formula", "", number, column, [role.group("value")])
                    entries.append(current)
                elif key in fields:
                    raise SpecFileError(f"line {number}: duplicate '{key}:' line")
                else:
                    fields[key] = role.group("value").strip()
                continue
            let = _LET.match(stripped)
            if let:
                column = raw.index(stripped) + let.start("value") + 1
                current = _Entry("let", let.group("name"), number, column, [let.group("value")])
                entries.append(current)
                continue
            param = _PARAM.match(stripped)
            if param:
                params = fields["params"]
                if param.group("name") in params:
                    raise SpecFileError(f"line {number}: parameter '{param.group('name')}' bound twice")
                params[param.group("name")] = param.group("value")
                continue
            option = _OPTION.match(stripped)
            if option:
                name = option.group("name")
                if name not in OPTIONS:
                    raise SpecFileError(f"line {number}: unknown option '{name}'")
                try:
                    fields[name] = int(option.group("value"))
                except ValueError:
                    raise SpecFileError(f"line {number}: option '{name}' needs an integer")
                continue

            if allow_bare:
                if bare is None:
                    bare = _Entry("formula", "", number, raw.index(stripped) + 1, [stripped])
                    entries.append(bare)
                else:
                    bare.lines.append(raw)
                continue
            raise SpecFileError(f"line {number}: unrecognized line '{stripped}'")
        return entries


# Global spec service instance
spec_service = SpecService()
