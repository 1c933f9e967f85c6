"""Plain-text family files.

    n <int>
    1 2 5        one set per line, ascending elements
    .            the empty set
    # comment
"""

from __future__ import annotations

from .rational import DomainError
from .sets import SetFamily, Subset, mask_members, members_mask


class FamilyFormatError(DomainError):
    pass


def parse_family(text: str) -> SetFamily:
    n = None
    masks = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if n is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "n" or not parts[1].isdigit():
                raise FamilyFormatError(f"expected 'n <int>' header at line {lineno}")
            n = int(parts[1])
            if n < 1:
                raise FamilyFormatError(f"ground set size must be positive at line {lineno}")
            continue
        if line == ".":
            masks.append(0)
            continue
        elems = []
        for tok in line.split():
            if not tok.isdigit():
                raise FamilyFormatError(f"malformed element {tok!r} at line {lineno}")
            x = int(tok)
            if x < 1:
                raise FamilyFormatError(f"element {x} is not positive at line {lineno}")
            if x > n:
                raise FamilyFormatError(f"element {x} exceeds n={n} at line {lineno}")
            elems.append(x)
        if any(a >= b for a, b in zip(elems, elems[1:])):
            raise FamilyFormatError(f"elements not strictly increasing at line {lineno}")
        masks.append(members_mask(elems))
    if n is None:
        raise FamilyFormatError("missing 'n <int>' header")
    return SetFamily(n, masks)


def format_set(mask: int) -> str:
    members = mask_members(mask)
    return " ".join(map(str, members)) if members else "."


def format_family(F: SetFamily) -> str:
    lines = [f"n {F.n}"]
    lines.extend(format_set(m) for m in F.masks)
    return "\n".join(lines) + "\n"


def parse_subset(text: str, n: int) -> Subset:
    """A single set written as a family line."""
    text = text.strip()
    if text == ".":
        return Subset(n, 0)
    elems = []
    for tok in text.replace(",", " ").split():
        if not tok.isdigit():
            raise FamilyFormatError(f"malformed element {tok!r}")
        elems.append(int(tok))
    return Subset.of(n, elems)


def format_subset(A: Subset) -> str:
    return format_set(A.mask)
