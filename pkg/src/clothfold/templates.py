"""Instruction template bank and instantiation."""

from __future__ import annotations

import hashlib
import os
import string
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from clothfold.errors import TemplateError, ValidationError
from clothfold.semantics import SemanticLabel

KINDS = ("sleeve", "refine", "fold")
PLACEHOLDERS = {
    "sleeve": frozenset({"which"}),
    "refine": frozenset({"which", "garment"}),
    "fold": frozenset({"garment", "which1", "which2"}),
}
TEMPLATE_BANK_ENV = "BIFOLD_TEMPLATE_BANK"

DEFAULT_GARMENT_NAMES = {"Skirt": "skirt", "Top": "top", "Trousers": "trousers", "Tshirt": "tshirt"}


def placeholders(template: str) -> set[str]:
    try:
        return {name for _, name, _, _ in string.Formatter().parse(template) if name is not None}
    except ValueError as exc:
        raise TemplateError(f"malformed template {template!r}: {exc}") from None


@dataclass(frozen=True)
class TemplateBank:
    sleeve_templates: tuple
    refine_templates: tuple
    fold_templates: tuple
    garment_names: dict = field(default_factory=lambda: dict(DEFAULT_GARMENT_NAMES))

    def __post_init__(self):
        for kind in KINDS:
            family = self.family(kind)
            if not family:
                raise TemplateError(f"template family {kind!r} is empty")
            for tpl in family:
                found = placeholders(tpl)
                unknown = found - PLACEHOLDERS[kind]
                if unknown:
                    raise TemplateError(f"unknown placeholder(s) {sorted(unknown)} in {kind} template {tpl!r}")

    def family(self, kind: str) -> tuple:
        if kind not in KINDS:
            raise ValidationError(f"unknown template kind {kind!r}")
        return getattr(self, f"{kind}_templates")

    def garment_name(self, category: str, capitalized: bool = False) -> str:
        """Surface form for a garment category, e.g. ``tshirt`` or ``Tshirt``."""
        name = self.garment_names.get(category, category)
        return name[:1].upper() + name[1:] if capitalized else name


def parse_bank(text: str) -> TemplateBank:
    """Read a sectioned bank: ``[sleeve]``, ``[refine]``, ``[fold]`` headers, one template per line."""
    families: dict[str, list[str]] = {k: [] for k in KINDS}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if current not in families:
                raise TemplateError(f"line {lineno}: unknown section [{current}]")
            continue
        if current is None:
            raise TemplateError(f"line {lineno}: template outside of a section")
        families[current].append(line)
    return TemplateBank(*(tuple(families[k]) for k in KINDS))


def load_bank(path=None) -> TemplateBank:
    """Load a bank from ``path``, else the ``BIFOLD_TEMPLATE_BANK`` file, else the bundled default."""
    path = path or os.environ.get(TEMPLATE_BANK_ENV)
    if path:
        return parse_bank(Path(path).read_text(encoding="utf-8"))
    return parse_bank(resources.files("clothfold.data").joinpath("templates.txt").read_text(encoding="utf-8"))


@dataclass(frozen=True)
class InstructionRecord:
    kind: str
    template_index: int
    text: str
    single_arm: Optional[str] = None

    def __post_init__(self):
        if "{" in self.text or "}" in self.text:
            raise TemplateError(f"unexpanded placeholder in {self.text!r}")


def classify_action(pick: SemanticLabel, place: SemanticLabel) -> str:
    if pick.sleeve_flag:
        return "sleeve"
    if pick.text == place.text:
        return "refine"
    return "fold"


def append_single_arm(text: str, arm: str) -> str:
    suffix = f" only using the {arm} arm"
    if text.endswith("."):
        return text[:-1] + suffix + "."
    return text + suffix


def derive_seed(global_seed: int, sequence_id: str, index: int = 0) -> int:
    """Stable per-action seed independent of processing order."""
    digest = hashlib.sha256(sequence_id.encode("utf-8")).digest()
    ss = np.random.SeedSequence([int(global_seed), int.from_bytes(digest[:8], "little"), int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def fill(template: str, kind: str, garment: str, pick: str, place: Optional[str] = None) -> str:
    values = {"which": pick, "garment": garment, "which1": pick, "which2": place}
    found = placeholders(template)
    unknown = found - PLACEHOLDERS[kind]
    if unknown:
        raise TemplateError(f"unknown placeholder(s) {sorted(unknown)} in {template!r}")
    return template.format(**{k: values[k] for k in found})


def instantiate(
    bank: TemplateBank,
    kind: str,
    garment: str,
    pick: SemanticLabel,
    place: Optional[SemanticLabel],
    single_arm: Optional[str],
    rng_seed: int,
) -> InstructionRecord:
    """Pick a template of ``kind`` uniformly at random and fill it in.

    ``garment`` is inserted verbatim.
    """
    if single_arm not in (None, "left", "right"):
        raise ValidationError(f"single_arm must be None, 'left' or 'right', got {single_arm!r}")
    if kind == "fold" and place is None:
        raise ValidationError("fold instructions need a place label")
    family = bank.family(kind)
    rng = np.random.default_rng(rng_seed)
    index = int(rng.integers(len(family)))
    text = fill(family[index], kind, garment, pick.text, place.text if place is not None else None)
    if single_arm is not None:
        text = append_single_arm(text, single_arm)
    return InstructionRecord(kind, index, text, single_arm)
