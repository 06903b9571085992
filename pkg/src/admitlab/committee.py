"""Fixed-size committee engine with exact rational arithmetic.

Opinions are exact rationals (python ints or fractions.Fraction; anything
registered as numbers.Rational).  Floats are rejected at the door: every
vote comparison, potential evaluation and drift bound in this module is
exact, which is what makes the adversarial certificates meaningful.

Members carry stable integer ids so that claims about removing or
protecting *original* members are about identities, not coincidental
values.  A committee is an immutable snapshot; replacements return a new
one.
"""

from __future__ import annotations

import numbers
from bisect import bisect_right
from fractions import Fraction
from typing import Optional, Sequence


def _check_rational(x, what: str):
    if isinstance(x, float) or not isinstance(x, numbers.Rational):
        raise TypeError(f"{what} must be an exact rational, got {type(x).__name__}")
    return x


class Committee:
    """Sorted fixed-size profile of exact opinions with member identities."""

    __slots__ = ("values", "ids", "n", "ell", "threshold",
                 "initial_x1", "initial_xn", "diameter", "_next_id")

    def __init__(self, opinions: Sequence, ell: int,
                 _internal: Optional[tuple] = None):
        if _internal is not None:
            (self.values, self.ids, self.n, self.ell, self.threshold,
             self.initial_x1, self.initial_xn, self.diameter,
             self._next_id) = _internal
            return
        vals = sorted(_check_rational(v, "opinion") for v in opinions)
        n = len(vals)
        if n < 1:
            raise ValueError("committee must have at least one member")
        if not 0 <= ell <= (n - 1) // 2:
            raise ValueError(f"ell={ell} outside 0..{(n - 1) // 2} for n={n}")
        self.values = tuple(vals)
        self.ids = tuple(range(1, n + 1))
        self.n = n
        self.ell = ell
        self.threshold = -((1 - n) // 2) + ell  # ceil((n-1)/2) + ell
        self.initial_x1 = vals[0]
        self.initial_xn = vals[-1]
        self.diameter = vals[-1] - vals[0]
        self._next_id = n + 1

    @staticmethod
    def consensus(opinions: Sequence) -> "Committee":
        """Committee under the consensus rule (ell at its maximum)."""
        vals = list(opinions)
        return Committee(vals, (len(vals) - 1) // 2)

    def opinion(self, i: int):
        """Opinion of the i-th member in sorted order, 1-based."""
        if not 1 <= i <= self.n:
            raise IndexError(f"member index {i} out of range 1..{self.n}")
        return self.values[i - 1]

    def vote_count(self, i: int, y) -> int:
        """Members j != i with |x_j - y| <= |x_j - x_i| (weak preference)."""
        if not 1 <= i <= self.n:
            raise IndexError(f"member index {i} out of range 1..{self.n}")
        _check_rational(y, "candidate")
        xi = self.values[i - 1]
        count = 0
        for j, xj in enumerate(self.values):
            if j == i - 1:
                continue
            if abs(xj - y) <= abs(xj - xi):
                count += 1
        return count

    def replace_attempt(self, i: int, y) -> tuple[bool, "Committee"]:
        """Swap member i for candidate y if the vote meets the threshold.

        Returns (accepted, committee); the committee is unchanged when the
        vote fails, and a re-sorted profile with a fresh member id when it
        succeeds.
        """
        votes = self.vote_count(i, y)
        if votes < self.threshold:
            return False, self
        vals = list(self.values)
        ids = list(self.ids)
        del vals[i - 1]
        del ids[i - 1]
        pos = bisect_right(vals, y)
        vals.insert(pos, y)
        ids.insert(pos, self._next_id)
        new = Committee((), 0, _internal=(
            tuple(vals), tuple(ids), self.n, self.ell, self.threshold,
            self.initial_x1, self.initial_xn, self.diameter,
            self._next_id + 1))
        return True, new

    def median(self):
        if self.n % 2 == 0:
            raise ValueError("median index requires odd committee size")
        return self.values[(self.n - 1) // 2]

    def potential(self):
        """Exact sum of member distances to the median (odd n only)."""
        if self.n % 2 == 0:
            raise ValueError("potential requires odd committee size")
        m = self.values[(self.n - 1) // 2]
        return sum(abs(v - m) for v in self.values)

    def consensus_monotone(self):
        """x_n + x_2 - x_1; never increases under accepted consensus steps."""
        if self.n < 3:
            raise ValueError("monotone quantity needs n >= 3")
        return self.values[-1] + self.values[1] - self.values[0]

    def consensus_monotone_mirror(self):
        """x_1 + x_{n-1} - x_n; never decreases (reflection of the above)."""
        if self.n < 3:
            raise ValueError("monotone quantity needs n >= 3")
        return self.values[0] + self.values[-2] - self.values[-1]

    def to_json_profile(self) -> list[str]:
        out = []
        for v in self.values:
            f = Fraction(v)
            out.append(f"{f.numerator}/{f.denominator}")
        return out

    @staticmethod
    def from_json_profile(profile: list, ell: int) -> "Committee":
        vals = []
        for s in profile:
            if isinstance(s, str):
                if "/" in s:
                    num, den = s.split("/", 1)
                    vals.append(Fraction(int(num), int(den)))
                else:
                    vals.append(Fraction(s))
            elif isinstance(s, numbers.Rational) and not isinstance(s, float):
                vals.append(s)
            else:
                raise TypeError(f"profile entries must be exact, got {s!r}")
        return Committee(vals, ell)

    def __repr__(self):
        vals = ", ".join(str(v) for v in self.values[:6])
        more = ", ..." if self.n > 6 else ""
        return f"Committee(n={self.n}, ell={self.ell}, [{vals}{more}])"


def shift_lemma_check(before: Committee, after: Committee) -> tuple[bool, object, object]:
    """Exact check of the potential-drop inequality for one accepted step.

    When the median moved right, the sum of distances to the median must
    drop by at least 2 * sum_{j=k-ell+2}^{k} d(x_j, x'_j) + d(x_{k+1},
    x'_{k+1}).  The moved-left case is checked through reflection.
    Returns (holds, decrease, required_decrease).
    """
    n = before.n
    if n != after.n or n % 2 == 0:
        raise ValueError("check needs two odd same-size configurations")
    if before.ell != after.ell:
        raise ValueError("configurations disagree on ell")
    if len(set(before.ids) - set(after.ids)) != 1:
        raise ValueError("after is not one replacement away from before")
    k = (n - 1) // 2
    med_before = before.values[k]
    med_after = after.values[k]
    if med_after == med_before:
        return True, before.potential() - after.potential(), 0
    if med_after < med_before:
        return _shift_check_right(_reflect(before), _reflect(after), k, before.ell)
    return _shift_check_right(before, after, k, before.ell)


def _reflect(c: Committee) -> Committee:
    vals = tuple(-v for v in reversed(c.values))
    ids = tuple(reversed(c.ids))
    return Committee((), 0, _internal=(
        vals, ids, c.n, c.ell, c.threshold,
        -c.initial_xn, -c.initial_x1, c.diameter, c._next_id))


def _shift_check_right(before: Committee, after: Committee,
                       k: int, ell: int):
    decrease = before.potential() - after.potential()
    required = abs(after.values[k] - before.values[k])
    for j in range(k - ell + 2, k + 1):          # 1-based j = k-ell+2 .. k
        required += 2 * abs(after.values[j - 1] - before.values[j - 1])
    return decrease >= required, decrease, required


def drift_bound_check(initial: Committee, current: Committee) -> tuple[bool, object, object]:
    """Exact check that indexed positions never drift past D*k/(2*ell-1).

    Verifies x'_{k-ell+2} <= x_n(0) + Dk/(2l-1) and the mirror bound
    x'_{k+ell} >= x_1(0) - Dk/(2l-1).  Only claimed for ell >= 1 and odd n.
    Returns (holds, right_slack, left_slack).
    """
    n = initial.n
    if n != current.n or n % 2 == 0:
        raise ValueError("check needs two odd same-size configurations")
    if initial.ell < 1:
        raise ValueError("drift bound only applies for ell >= 1")
    k = (n - 1) // 2
    ell = initial.ell
    bound = Fraction(initial.diameter * k, 2 * ell - 1)
    hi = initial.initial_xn + bound
    lo = initial.initial_x1 - bound
    right_slack = hi - current.values[k - ell + 2 - 1]
    left_slack = current.values[k + ell - 1] - lo
    return right_slack >= 0 and left_slack >= 0, right_slack, left_slack
