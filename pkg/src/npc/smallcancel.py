"""Pieces, C'(1/6) checking, and Dehn's algorithm.

Words are strings over lowercase generators, uppercase denoting inverses.
Piece enumeration exists twice: over polygonal complexes (paths shared by two
polygon boundaries) and over presentations (common subwords among cyclic
shifts of relators and their inverses).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache

from .complex_core import (POLYGONAL, Complex, Presentation, _cyclic_reduce,
                           _free_reduce, _invert_letter, canonical_cycle)
from .errors import KindMismatch, NotC16
from .report import CheckReport


def invert_word(word: str) -> str:
    return "".join(_invert_letter(ch) for ch in reversed(word))


def free_reduce(word: str) -> str:
    return _free_reduce(word)


def cyclic_reduce(word: str) -> str:
    return _cyclic_reduce(word)


def cyclic_shifts(word: str) -> list[str]:
    return [word[i:] + word[:i] for i in range(len(word))]


@dataclass(frozen=True)
class Piece:
    """A path or word shared by two cell/relator occurrences."""

    carrier: tuple
    length: int
    occurrences: tuple

    def as_dict(self) -> dict:
        return {"carrier": list(self.carrier), "length": self.length,
                "occurrences": [list(o) for o in self.occurrences]}


@dataclass(frozen=True)
class C16Report:
    verdict: bool
    max_piece_per_cell: tuple
    boundary_lengths: tuple
    worst: tuple | None

    @property
    def passed(self) -> bool:
        return self.verdict

    def as_dict(self) -> dict:
        return {
            "check": "c16",
            "verdict": "pass" if self.verdict else "fail",
            "witness": None if self.worst is None else list(self.worst),
            "stats": {
                "max_piece_per_cell": list(self.max_piece_per_cell),
                "boundary_lengths": list(self.boundary_lengths),
            },
        }


# -- presentation-level pieces ---------------------------------------------

def _positions(p: Presentation):
    """All (relator index, orientation, shift) with the shifted word."""
    out = []
    for i, r in enumerate(p.relators):
        for eps, base in ((1, r), (-1, invert_word(r))):
            for s in range(len(base)):
                out.append(((i, eps, s), base[s:] + base[:s]))
    return out


def _match_cap(p1, p2, l1, l2) -> int:
    """Largest admissible piece length for a pair of positions.

    A relator overlapping its own rotation by d matches periodically without
    end, but the geometric overlap has only len - d edges, which is also the
    classical piece length for proper powers.
    """
    (i1, e1, s1), (i2, e2, s2) = p1, p2
    cap = min(l1, l2)
    if i1 == i2 and e1 == e2:
        d = (s2 - s1) % l1
        if d == 0:
            return 0
        cap = min(cap, l1 - d)
    return cap


def enumerate_pieces_presentation(p: Presentation) -> list[Piece]:
    """Maximal common subwords between distinct shift positions."""
    positions = _positions(p)
    pieces = {}
    for a in range(len(positions)):
        pos1, w1 = positions[a]
        for b in range(a + 1, len(positions)):
            pos2, w2 = positions[b]
            cap = _match_cap(pos1, pos2, len(w1), len(w2))
            ln = 0
            while ln < cap and w1[ln % len(w1)] == w2[ln % len(w2)]:
                ln += 1
            if ln == 0:
                continue
            word = (w1 * 2)[:ln] if ln <= len(w1) else w1[:ln]
            key = (word, pos1, pos2)
            pieces[key] = Piece(tuple(word), ln, (pos1, pos2))
    # keep only pieces maximal for their position pair
    out = sorted(pieces.values(), key=lambda pc: (-pc.length, pc.occurrences))
    return out


def max_piece_with_relator(p: Presentation, pieces=None) -> list[int]:
    """Longest piece length touching each relator."""
    if pieces is None:
        pieces = enumerate_pieces_presentation(p)
    best = [0] * len(p.relators)
    for pc in pieces:
        for (i, _, _) in pc.occurrences:
            best[i] = max(best[i], pc.length)
    return best


@lru_cache(maxsize=256)
def check_c16_presentation(p: Presentation) -> C16Report:
    per = max_piece_with_relator(p)
    lens = [len(r) for r in p.relators]
    worst = None
    ok = True
    for i, (m, l) in enumerate(zip(per, lens)):
        if not (m < l / 6.0):
            ok = False
            if worst is None or m * lens[worst[0]] > worst[1] * l:
                worst = (i, m)
    return C16Report(ok, tuple(per), tuple(lens), worst)


def naive_max_common_subword(p: Presentation) -> list[int]:
    """O(L^4) oracle: direct all-pairs scan over shifts, same conventions."""
    positions = _positions(p)
    best = [0] * len(p.relators)
    for a in range(len(positions)):
        for b in range(len(positions)):
            if a == b:
                continue
            pos1, w1 = positions[a]
            pos2, w2 = positions[b]
            cap = _match_cap(pos1, pos2, len(w1), len(w2))
            for ln in range(1, cap + 1):
                if all(w1[k % len(w1)] == w2[k % len(w2)] for k in range(ln)):
                    best[pos1[0]] = max(best[pos1[0]], ln)
                    best[pos2[0]] = max(best[pos2[0]], ln)
                else:
                    break
    return best


# -- complex-level pieces ----------------------------------------------------

def _directed_runs(w1, w2):
    """Maximal common directed subpaths between two embedded cycles."""
    n1, n2 = len(w1), len(w2)
    starts = {}
    for j in range(n2):
        starts.setdefault((w2[j], w2[(j + 1) % n2]), []).append(j)
    runs = []
    for i in range(n1):
        de = (w1[i], w1[(i + 1) % n1])
        for j in starts.get(de, ()):
            if w1[(i - 1) % n1] == w2[(j - 1) % n2]:
                continue  # extendable backward; counted at its maximal start
            ln = 1
            while ln < min(n1, n2) and \
                    w1[(i + ln + 1) % n1] == w2[(j + ln + 1) % n2]:
                ln += 1
            # trim so the carrier is an embedded path
            path = tuple(w1[(i + k) % n1] for k in range(ln + 1))
            while ln >= 1 and len(set(path)) != len(path):
                ln -= 1
                path = tuple(w1[(i + k) % n1] for k in range(ln + 1))
            if ln >= 1:
                runs.append((path, i, j, ln))
    return runs


def enumerate_pieces_complex(cx: Complex) -> list[Piece]:
    """All maximal pieces plus the one-edge convention pieces."""
    if cx.kind != POLYGONAL:
        raise KindMismatch("piece enumeration requires a polygonal complex")
    pieces = []
    walks = [cx.cell_walk(i) for i in range(len(cx.cells))]
    for a in range(len(walks)):
        for b in range(a + 1, len(walks)):
            if canonical_cycle(walks[a]) == canonical_cycle(walks[b]):
                # a full boundary identification commutes; skip the pair
                continue
            for wb, refl in ((walks[b], False), (walks[b][::-1], True)):
                for path, i, j, ln in _directed_runs(walks[a], wb):
                    occ = ((a, i, False), (b, j, refl))
                    pieces.append(Piece(path, ln, occ))
    for e in cx.edges:
        cells = tuple((c, -1, False) for c in cx.cells_at_edge.get(e, ()))
        pieces.append(Piece(e, 1, cells))
    seen = set()
    out = []
    for pc in sorted(pieces, key=lambda q: (-q.length, q.carrier, q.occurrences)):
        key = (min(tuple(pc.carrier), tuple(reversed(pc.carrier))),
               tuple(sorted(o[0] for o in pc.occurrences)))
        if key in seen:
            continue
        seen.add(key)
        out.append(pc)
    return out


def check_c16_complex(cx: Complex) -> C16Report:
    """Strict piece inequality against every polygon containing the piece."""
    pieces = enumerate_pieces_complex(cx)
    lens = [len(cx.cell_walk(i)) for i in range(len(cx.cells))]
    per = [0] * len(cx.cells)
    worst = None
    ok = True
    for pc in pieces:
        path = tuple(pc.carrier)
        for cid, boundary_len in enumerate(lens):
            if _path_on_cycle(path, cx.cell_walk(cid)):
                per[cid] = max(per[cid], pc.length)
                if not (pc.length < boundary_len / 6.0):
                    ok = False
                    if worst is None:
                        worst = (cid, pc.length)
    return C16Report(ok, tuple(per), tuple(lens), worst)


def _path_on_cycle(path, cycle) -> bool:
    if len(path) < 2:
        return False
    n = len(cycle)
    for cyc in (cycle, cycle[::-1]):
        for i in range(n):
            if all(cyc[(i + k) % n] == path[k] for k in range(len(path))):
                return True
    return False


# -- Dehn's algorithm ----------------------------------------------------------

@lru_cache(maxsize=256)
def _symmetrized(p: Presentation):
    """All cyclic shifts of all relators and their inverses, tagged."""
    out = []
    for i, r in enumerate(p.relators):
        for eps, base in ((1, r), (-1, invert_word(r))):
            for s in range(len(base)):
                out.append((i, eps, s, base[s:] + base[:s]))
    return tuple(out)


def _require_c16(p: Presentation):
    if not check_c16_presentation(p).verdict:
        raise NotC16("presentation fails C'(1/6)")


def _one_dehn_step(w: str, sym) -> str | None:
    """Leftmost-longest replacement of a cyclic subword longer than half a
    relator by the inverse of its complement; None if no move applies."""
    n = len(w)
    if n == 0:
        return None
    doubled = w + w
    best = None
    for start in range(n):
        for (i, eps, s, sigma) in sym:
            limit = min(len(sigma), n)
            ln = 0
            while ln < limit and doubled[start + ln] == sigma[ln]:
                ln += 1
            if 2 * ln > len(sigma):
                cand = (start, -ln, (i, eps, s), sigma)
                if best is None or cand[:3] < best[:3]:
                    best = cand
        if best is not None and best[0] == start:
            break
    if best is None:
        return None
    start, neg_ln, _, sigma = best
    ln = -neg_ln
    rotated = w[start:] + w[:start]
    complement = sigma[ln:]
    return invert_word(complement) + rotated[ln:]


def dehn_reduce(p: Presentation, word: str) -> str:
    """Greedy Dehn normal form of the cyclic reduction of the word."""
    _require_c16(p)
    sym = _symmetrized(p)
    w = cyclic_reduce(word)
    while True:
        nxt = _one_dehn_step(w, sym)
        if nxt is None:
            return w
        w = cyclic_reduce(nxt)


def is_trivial(p: Presentation, word: str) -> bool:
    return dehn_reduce(p, word) == ""


def bfs_is_trivial(p: Presentation, word: str, max_states: int = 200000) -> bool:
    """Exhaustive relator-replacement search, independent of the greedy path.

    Explores every replacement of a cyclic subword covering at least half a
    relator, breadth-first with memoization. Complete for C'(1/6)
    presentations because some strict Dehn move applies to every nontrivial
    trivial word, and no move ever lengthens the word.
    """
    _require_c16(p)
    sym = _symmetrized(p)
    start = _canon_word(cyclic_reduce(word))
    if start == "":
        return True
    seen = {start}
    queue = deque([start])
    while queue:
        if len(seen) > max_states:
            raise MemoryError("bfs_is_trivial state budget exceeded")
        w = queue.popleft()
        n = len(w)
        doubled = w + w
        for pos in range(n):
            for (_, _, _, sigma) in sym:
                limit = min(len(sigma), n)
                ln = 0
                while ln < limit and doubled[pos + ln] == sigma[ln]:
                    ln += 1
                for use in range((len(sigma) + 1) // 2, ln + 1):
                    rotated = w[pos:] + w[:pos]
                    nxt = invert_word(sigma[use:]) + rotated[use:]
                    nxt = _canon_word(cyclic_reduce(nxt))
                    if nxt == "":
                        return True
                    if len(nxt) <= len(start) and nxt not in seen:
                        seen.add(nxt)
                        queue.append(nxt)
    return False


def _canon_word(w: str) -> str:
    if not w:
        return w
    return min(w[i:] + w[:i] for i in range(len(w)))
