"""Category lexicon (.dic layout) loading and token matching.

Layout: a ``%`` line, then ``id<TAB>name`` category declarations, a second
``%`` line, then ``pattern<TAB>id...`` entries. A trailing ``*`` on a
pattern makes it a stem (prefix) match. Matching is case-insensitive.
No dictionary content is bundled; callers supply their own.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from dsk.errors import LexiconError


@dataclass(frozen=True)
class CategoryLexicon:
    categories: tuple[tuple[int, str], ...]
    entries: tuple[tuple[str, frozenset[int]], ...]
    _exact: dict[str, frozenset[int]] = field(repr=False, default_factory=dict)
    _stems: dict[str, frozenset[int]] = field(repr=False, default_factory=dict)

    def category_names(self) -> list[str]:
        return [name for _, name in self.categories]

    def match(self, token: str) -> set[int]:
        """Category ids the token belongs to (exact or stem prefix)."""
        token = token.lower()
        cats: set[int] = set()
        if token in self._exact:
            cats |= self._exact[token]
        if self._stems:
            for length in range(1, len(token) + 1):
                hit = self._stems.get(token[:length])
                if hit:
                    cats |= hit
        return cats


def load_lexicon(data: bytes | str) -> CategoryLexicon:
    """Parse a .dic lexicon; duplicate patterns merge their category sets."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    lines = [ln.rstrip("\n") for ln in text.splitlines()]
    marks = [i for i, ln in enumerate(lines) if ln.strip() == "%"]
    if len(marks) < 2:
        raise LexiconError("missing '%' header delimiters")
    header = lines[marks[0] + 1: marks[1]]
    body = lines[marks[1] + 1:]

    categories: list[tuple[int, str]] = []
    seen_ids: set[int] = set()
    for ln in header:
        if not ln.strip():
            continue
        fields = ln.split()
        if len(fields) < 2:
            raise LexiconError(f"bad category line: {ln!r}")
        try:
            cat_id = int(fields[0])
        except ValueError as exc:
            raise LexiconError(f"bad category id in {ln!r}") from exc
        if cat_id in seen_ids:
            raise LexiconError(f"duplicate category id {cat_id}")
        seen_ids.add(cat_id)
        categories.append((cat_id, fields[1]))

    merged: dict[str, set[int]] = {}
    for ln in body:
        if not ln.strip():
            continue
        fields = ln.split()
        if len(fields) < 2:
            raise LexiconError(f"entry without categories: {ln!r}")
        pattern = fields[0].lower()
        ids = set()
        for f in fields[1:]:
            try:
                cat_id = int(f)
            except ValueError as exc:
                raise LexiconError(f"bad category id in entry {ln!r}") from exc
            if cat_id not in seen_ids:
                raise LexiconError(f"entry {pattern!r} references unknown category {cat_id}")
            ids.add(cat_id)
        merged.setdefault(pattern, set()).update(ids)

    exact: dict[str, frozenset[int]] = {}
    stems: dict[str, frozenset[int]] = {}
    entries = []
    for pattern in merged:
        ids_frozen = frozenset(merged[pattern])
        entries.append((pattern, ids_frozen))
        if pattern.endswith("*"):
            stem = pattern[:-1]
            if not stem:
                raise LexiconError("bare '*' pattern")
            stems[stem] = ids_frozen | stems.get(stem, frozenset())
        else:
            exact[pattern] = ids_frozen | exact.get(pattern, frozenset())
    return CategoryLexicon(
        categories=tuple(categories),
        entries=tuple(sorted(entries)),
        _exact=exact,
        _stems=stems,
    )
