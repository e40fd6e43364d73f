"""Prompt assembly for the four agent roles.

Every full prompt carries four crafted sections -- role instructions, a
schema description rendered from the live catalog, transportation domain
knowledge, and the per-role output contract -- plus optional worked
examples and a digest of the team's shared progress.  A deliberately bare
variant (table names and the question only) exists for the
feature-toggle experiments.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .fewshot import FewShotExample
from .llm import ChatMessage, estimate_tokens
from .schema import SchemaCatalog

DEFAULT_TEMPLATE_DIR = Path(__file__).parent / "templates"

_SECTION_MARK = re.compile(r"^===\s*(\w+)\s*===\s*$", re.MULTILINE)


class AgentRole(str, enum.Enum):
    MANAGER = "project_manager"
    ENGINEER = "sql_engineer"
    QUALITY = "quality_analyst"
    ANALYST = "data_analyst"


_ROLE_FILES = {
    AgentRole.MANAGER: "manager.txt",
    AgentRole.ENGINEER: "engineer.txt",
    AgentRole.QUALITY: "quality.txt",
    AgentRole.ANALYST: "analyst.txt",
}


class TemplateIncompleteError(ValueError):
    """A required prompt section is missing or empty."""


@dataclass(frozen=True)
class PromptTemplate:
    agent_role: AgentRole
    role_instructions: str
    schema_description: str
    domain_knowledge: str
    output_format: str
    fewshot_slots: int = 3


@dataclass(frozen=True)
class RenderedPrompt:
    messages: Tuple[ChatMessage, ...]
    token_estimate: int

    def text(self) -> str:
        return "\n\n".join(m.content for m in self.messages)


def render_schema_description(catalog: SchemaCatalog) -> str:
    lines = ["The read-only warehouse has these tables:"]
    for table, columns in catalog.tables.items():
        cols = ", ".join(f"{name} ({sem.value})" for name, sem in columns)
        lines.append(f"- {table}: {cols}")
        if catalog.is_minute_table(table):
            lines.append("  (minute-grained; always aggregate or LIMIT)")
    lines.append(
        "Timestamps in `timestamp` columns are UTC; `local_timestamp` holds the "
        "same instant as local wall-clock time. Use local_timestamp for peak-hour "
        "and weekday questions.")
    return "\n".join(lines)


class TemplateSet:
    """Per-role templates plus the shared domain-knowledge text."""

    def __init__(self, templates: Dict[AgentRole, PromptTemplate]):
        self._templates = templates

    def for_role(self, role: AgentRole) -> PromptTemplate:
        return self._templates[role]

    @classmethod
    def load(cls, catalog: SchemaCatalog,
             template_dir: "str | Path | None" = None,
             fewshot_slots: int = 3) -> "TemplateSet":
        directory = Path(template_dir) if template_dir else DEFAULT_TEMPLATE_DIR
        domain_file = directory / "domain_knowledge.txt"
        if not domain_file.exists():
            raise TemplateIncompleteError(f"missing {domain_file}")
        domain = domain_file.read_text(encoding="utf-8").strip()
        schema_text = render_schema_description(catalog)
        templates: Dict[AgentRole, PromptTemplate] = {}
        for role, filename in _ROLE_FILES.items():
            file = directory / filename
            if not file.exists():
                raise TemplateIncompleteError(f"missing {file}")
            sections = _parse_sections(file.read_text(encoding="utf-8"))
            try:
                role_text = sections["role_instructions"].strip()
                format_text = sections["output_format"].strip()
            except KeyError as missing:
                raise TemplateIncompleteError(
                    f"{filename} lacks section {missing}") from None
            templates[role] = PromptTemplate(
                agent_role=role,
                role_instructions=role_text,
                schema_description=schema_text,
                domain_knowledge=domain,
                output_format=format_text,
                fewshot_slots=fewshot_slots,
            )
        return cls(templates)


def _parse_sections(text: str) -> Dict[str, str]:
    sections: Dict[str, str] = {}
    matches = list(_SECTION_MARK.finditer(text))
    for idx, match in enumerate(matches):
        end = matches[idx + 1].start() if idx + 1 < len(matches) else len(text)
        sections[match.group(1)] = text[match.end():end]
    return sections


def render(template: PromptTemplate, question: str,
           fewshot: Sequence[FewShotExample] = (),
           scratchpad_digest: str = "",
           agent_role: Optional[AgentRole] = None) -> RenderedPrompt:
    """Assemble the full prompt; deterministic in its inputs.

    Section order is fixed: role, schema, domain knowledge, worked
    examples (as provided, most similar first), shared context digest,
    question, output format.
    """
    role = agent_role or template.agent_role
    required = {
        "role_instructions": template.role_instructions,
        "schema_description": template.schema_description,
        "domain_knowledge": template.domain_knowledge,
        "output_format": template.output_format,
    }
    for name, value in required.items():
        if not value.strip():
            raise TemplateIncompleteError(f"section {name} is empty for {role.value}")
    if len(fewshot) > template.fewshot_slots:
        fewshot = list(fewshot)[:template.fewshot_slots]

    system = (
        f"## Role\n{template.role_instructions}\n\n"
        f"## Database schema\n{template.schema_description}\n\n"
        f"## Domain knowledge\n{template.domain_knowledge}"
    )
    user_parts: List[str] = []
    if fewshot:
        blocks = [f"Question: {ex.question}\nSQL: {ex.sql}" for ex in fewshot]
        user_parts.append("## Worked examples\n" + "\n\n".join(blocks))
    if scratchpad_digest.strip():
        user_parts.append(f"## Shared context\n{scratchpad_digest}")
    user_parts.append(f"## Question\n{question}")
    user_parts.append(f"## Output format\n{template.output_format}")
    messages = (
        ChatMessage("system", system),
        ChatMessage("user", "\n\n".join(user_parts)),
    )
    return RenderedPrompt(
        messages=messages,
        token_estimate=sum(estimate_tokens(m.content) for m in messages),
    )


def render_minimal(question: str, catalog: SchemaCatalog) -> RenderedPrompt:
    """Bare prompt for the no-crafted-prompt variant: names and question only."""
    lines = ["Tables:"]
    for table in catalog.tables:
        lines.append(f"  {table}: {', '.join(catalog.column_names(table))}")
    lines.append(f"Question: {question}")
    messages = (ChatMessage("user", "\n".join(lines)),)
    return RenderedPrompt(
        messages=messages,
        token_estimate=sum(estimate_tokens(m.content) for m in messages),
    )
