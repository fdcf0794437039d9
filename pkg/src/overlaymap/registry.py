"""Subject-category registry: canonical names, aliases and macro-disciplines.

Registry file grammar (UTF-8, ``\\n`` line endings)::

    # comment lines start with '#'
    <id> TAB <canonical name> TAB <alias1>;<alias2>;...

The alias field may be empty or absent. Ids must form the dense range
``0..S-1`` (in any line order).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

_WS = re.compile(r"\s+")
_TRAILING_PUNCT = ".,;:!?"


class RegistryError(ValueError):
    """Malformed registry file or inconsistent registry update."""


def normalize_name(raw: str) -> str:
    """Deterministic cleanup used for every category-name comparison.

    Trims, case-folds, collapses internal whitespace and strips trailing
    punctuation. No fuzzy matching happens beyond this.
    """
    s = _WS.sub(" ", raw.strip()).casefold()
    s = s.rstrip(_TRAILING_PUNCT + " ")
    return s


@dataclass(frozen=True)
class SubjectCategory:
    id: int
    name: str
    aliases: tuple[str, ...] = ()
    macro_id: int | None = None


@dataclass(frozen=True)
class MacroDiscipline:
    id: int
    label: str
    color: tuple[int, int, int]

    @property
    def hex(self) -> str:
        return "#{:02x}{:02x}{:02x}".format(*self.color)


@dataclass(frozen=True)
class CategoryRegistry:
    """Immutable set of subject categories indexed ``0..S-1``."""

    categories: tuple[SubjectCategory, ...]
    macros: tuple[MacroDiscipline, ...] = ()
    _index: dict[str, int] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        for pos, cat in enumerate(self.categories):
            if cat.id != pos:
                raise RegistryError(f"category ids must be dense; position {pos} holds id {cat.id}")
        index: dict[str, int] = {}
        for cat in self.categories:
            key = normalize_name(cat.name)
            if not key:
                raise RegistryError(f"category {cat.id} has an empty name")
            if key in index:
                raise RegistryError(
                    f"duplicate canonical name {cat.name!r} (ids {index[key]} and {cat.id})"
                )
            index[key] = cat.id
        for cat in self.categories:
            for alias in cat.aliases:
                key = normalize_name(alias)
                if not key:
                    continue
                other = index.get(key)
                if other is not None and other != cat.id:
                    raise RegistryError(
                        f"alias {alias!r} of id {cat.id} collides with id {other}"
                    )
                index[key] = cat.id
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.categories)

    @property
    def size(self) -> int:
        return len(self.categories)

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.categories]

    def macro_assignment(self) -> list[int | None]:
        return [c.macro_id for c in self.categories]

    def resolve(self, raw: str) -> int | None:
        return self._index.get(normalize_name(raw))


def resolve_name(registry: CategoryRegistry, raw: str) -> int | None:
    """Return the category id whose canonical name or alias matches ``raw``."""
    return registry.resolve(raw)


def parse_registry(text: str) -> CategoryRegistry:
    entries: dict[int, SubjectCategory] = {}
    seen_names: dict[str, int] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) < 2 or len(parts) > 3:
            raise RegistryError(f"line {lineno}: expected 'id<TAB>name<TAB>aliases'")
        try:
            cid = int(parts[0].strip())
        except ValueError:
            raise RegistryError(f"line {lineno}: id {parts[0]!r} is not an integer") from None
        name = parts[1].strip()
        if not name:
            raise RegistryError(f"line {lineno}: empty canonical name")
        key = normalize_name(name)
        if key in seen_names:
            raise RegistryError(
                f"line {lineno}: duplicate canonical name {name!r} "
                f"(first seen on line {seen_names[key]})"
            )
        seen_names[key] = lineno
        if cid in entries:
            raise RegistryError(f"line {lineno}: duplicate id {cid}")
        alias_field = parts[2] if len(parts) == 3 else ""
        aliases = tuple(a.strip() for a in alias_field.split(";") if a.strip())
        entries[cid] = SubjectCategory(cid, name, aliases)
    if not entries:
        raise RegistryError("registry file contains no categories")
    if sorted(entries) != list(range(len(entries))):
        raise RegistryError(f"ids are not the dense range 0..{len(entries) - 1}")
    return CategoryRegistry(tuple(entries[i] for i in range(len(entries))))


def load_registry(source: str | Path) -> CategoryRegistry:
    """Read a registry file. Raises :class:`RegistryError` on malformed input."""
    return parse_registry(Path(source).read_text(encoding="utf-8"))


def dump_registry(registry: CategoryRegistry) -> str:
    lines = [f"{c.id}\t{c.name}\t{';'.join(c.aliases)}" for c in registry.categories]
    return "\n".join(lines) + "\n"


def from_names(names: Iterable[str]) -> CategoryRegistry:
    """Registry with ids assigned in iteration order and no aliases."""
    return CategoryRegistry(tuple(SubjectCategory(i, n) for i, n in enumerate(names)))


# 20 qualitative colours; cycled when more factors are requested.
DEFAULT_PALETTE: tuple[tuple[int, int, int], ...] = (
    (31, 119, 180), (255, 127, 14), (44, 160, 44), (214, 39, 40), (148, 103, 189),
    (140, 86, 75), (227, 119, 194), (127, 127, 127), (188, 189, 34), (23, 190, 207),
    (174, 199, 232), (255, 187, 120), (152, 223, 138), (255, 152, 150), (197, 176, 213),
    (196, 156, 148), (247, 182, 210), (199, 199, 199), (219, 219, 141), (158, 218, 229),
)


def default_labels(n_factors: int) -> list[str]:
    return [f"Factor {i + 1}" for i in range(n_factors)]


def default_palette(n_factors: int) -> list[tuple[int, int, int]]:
    return [DEFAULT_PALETTE[i % len(DEFAULT_PALETTE)] for i in range(n_factors)]


def parse_color(text: str) -> tuple[int, int, int]:
    s = text.strip().lstrip("#")
    if len(s) != 6:
        raise RegistryError(f"colour {text!r} is not #rrggbb")
    try:
        return (int(s[0:2], 16), int(s[2:4], 16), int(s[4:6], 16))
    except ValueError:
        raise RegistryError(f"colour {text!r} is not #rrggbb") from None


def apply_factor_labels(
    registry: CategoryRegistry,
    assignment: Sequence[int],
    labels: Sequence[str],
    palette: Sequence[tuple[int, int, int]],
) -> CategoryRegistry:
    """Attach macro-discipline ids, labels and colours to every category.

    ``assignment`` may be a plain sequence or anything with an
    ``assignment`` attribute (a ``FactorAssignment``).
    """
    assignment = list(getattr(assignment, "assignment", assignment))
    if len(assignment) != registry.size:
        raise RegistryError(
            f"assignment has {len(assignment)} entries; registry has {registry.size} categories"
        )
    if len(labels) != len(palette):
        raise RegistryError(f"{len(labels)} labels but {len(palette)} colours")
    n_factors = len(labels)
    if len(set(labels)) != n_factors:
        raise RegistryError("macro-discipline labels must be unique")
    for cid, f in enumerate(assignment):
        if not 0 <= int(f) < n_factors:
            raise RegistryError(f"category {cid} assigned to factor {f}, outside 0..{n_factors - 1}")
    macros = tuple(
        MacroDiscipline(i, str(labels[i]), tuple(int(v) for v in palette[i])) for i in range(n_factors)
    )
    cats = tuple(replace(c, macro_id=int(assignment[c.id])) for c in registry.categories)
    return CategoryRegistry(cats, macros)
