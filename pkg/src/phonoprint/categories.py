"""IPA phoneme categories used for category-restricted scoring.

The seven built-in categories partition the default 40-phoneme English
inventory; "All" is special-cased to mean "no filter", so labels outside
every category are still scorable under it. The table can be overridden
from a plain text file (see parse_categories)."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PhonemeCategory:
    name: str
    members: frozenset[str]

    def __contains__(self, label: str) -> bool:
        return label in self.members


ALL_CATEGORY_NAME = "All"

_TABLE = {
    "Vowels": ("i", "æ", "ɑ", "ɪ", "ʌ", "u", "ɔ", "ə", "ɜr", "ɛ", "ʊ"),
    "Diphthongs": ("aɪ", "oʊ", "ɔɪ", "aʊ", "eɪ"),
    "Plosives": ("k", "p", "t", "b", "d", "g"),
    "Fricatives": ("ʃ", "s", "z", "θ", "ð", "f", "v", "ʒ", "h"),
    "Affricates": ("tʃ", "dʒ"),
    "Approximants": ("l", "j", "w", "r"),
    "Nasals": ("m", "n", "ŋ"),
}

CATEGORIES: dict[str, PhonemeCategory] = {
    name: PhonemeCategory(name, frozenset(members)) for name, members in _TABLE.items()
}
CATEGORY_NAMES = tuple(_TABLE) + (ALL_CATEGORY_NAME,)

# Default inventory: the categorized phonemes, in table order.
DEFAULT_INVENTORY: tuple[str, ...] = tuple(
    label for members in _TABLE.values() for label in members
)

ALL_CATEGORY = PhonemeCategory(ALL_CATEGORY_NAME, frozenset(DEFAULT_INVENTORY))
CATEGORIES[ALL_CATEGORY_NAME] = ALL_CATEGORY


def get_category(name: str) -> PhonemeCategory:
    try:
        return CATEGORIES[name]
    except KeyError:
        raise KeyError(
            f"unknown category {name!r}; expected one of {', '.join(CATEGORY_NAMES)}"
        ) from None


def parse_categories(text: str) -> dict[str, PhonemeCategory]:
    """Parse a category override file.

    One category per line: "Name: label label label". Blank lines and lines
    starting with '#' are ignored. An "All" category is appended as the
    union unless the file defines one.
    """
    table: dict[str, PhonemeCategory] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        name, sep, rest = line.partition(":")
        if not sep:
            raise ValueError(f"line {lineno}: expected 'Name: labels...'")
        name = name.strip()
        members = frozenset(rest.split())
        if not name or not members:
            raise ValueError(f"line {lineno}: category name and members required")
        if name in table:
            raise ValueError(f"line {lineno}: duplicate category {name!r}")
        table[name] = PhonemeCategory(name, members)
    if ALL_CATEGORY_NAME not in table:
        union = frozenset().union(*(c.members for c in table.values())) if table else frozenset()
        table[ALL_CATEGORY_NAME] = PhonemeCategory(ALL_CATEGORY_NAME, union)
    return table
