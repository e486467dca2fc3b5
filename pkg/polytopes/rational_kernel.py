"""Точная рациональная арифметика, линейная алгебра и многочлены от κ"""
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from math import gcd
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from polytopes.errors import ValidationError

Rational = Union[int, Fraction]
IntVector = Tuple[int, ...]
Exponent = Tuple[int, ...]


def to_rational(value) -> Fraction:
    """
    Привести значение к Fraction

    Args:
        value: int, Fraction или строка вида "p/q"

    Returns:
        Несократимая дробь

    Raises:
        ValidationError: для float и нераспознанных строк
    """
    if isinstance(value, bool):
        raise ValidationError("Boolean is not a rational number", {"value": value})
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip().replace("−", "-"))
        except (ValueError, ZeroDivisionError):
            raise ValidationError(f"Cannot parse rational: {value!r}", {"value": value})
    raise ValidationError(
        f"Unsupported rational type: {type(value).__name__}",
        {"value": repr(value)},
    )


def format_rational(value: Rational) -> str:
    """Строка "p" или "p/q" """
    q = to_rational(value)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _normalize(value: Rational) -> Rational:
    # целые храним как int: заметно быстрее на плотных многочленах
    if isinstance(value, Fraction) and value.denominator == 1:
        return value.numerator
    return value


def dot(u: Sequence[Rational], v: Sequence[Rational]) -> Rational:
    if len(u) != len(v):
        raise ValidationError("Vector length mismatch", {"left": len(u), "right": len(v)})
    return sum((a * b for a, b in zip(u, v)), 0)


def mat_vec(matrix: Sequence[Sequence[Rational]], vector: Sequence[Rational]) -> List[Rational]:
    return [dot(row, vector) for row in matrix]


def transpose(matrix: Sequence[Sequence[Rational]]) -> List[List[Rational]]:
    if not matrix:
        return []
    return [list(column) for column in zip(*matrix)]


def primitive(vector: Sequence[int]) -> IntVector:
    """
    Примитивный целый вектор того же направления

    Raises:
        ValidationError: нулевой или нецелый вектор
    """
    entries = tuple(vector)
    if any(not isinstance(x, int) or isinstance(x, bool) for x in entries):
        raise ValidationError("Primitive vector needs integer entries", {"vector": list(map(str, entries))})
    divisor = 0
    for x in entries:
        divisor = gcd(divisor, x)
    if divisor == 0:
        raise ValidationError("Zero vector has no primitive form", {"vector": list(entries)})
    return tuple(x // divisor for x in entries)


def _check_rows(matrix: Sequence[Sequence[Rational]], ncols: Optional[int]) -> int:
    widths = {len(row) for row in matrix}
    if len(widths) > 1:
        raise ValidationError("Inconsistent row lengths", {"widths": sorted(widths)})
    if widths:
        width = widths.pop()
        if ncols is not None and ncols != width:
            raise ValidationError("Column count mismatch", {"expected": ncols, "actual": width})
        return width
    if ncols is None:
        raise ValidationError("Empty matrix needs an explicit column count")
    return ncols


def rref(matrix: Sequence[Sequence[Rational]], ncols: Optional[int] = None) -> Tuple[List[List[Fraction]], List[int]]:
    """
    Приведенный ступенчатый вид с выбором первого ненулевого ведущего элемента

    Returns:
        (строки RREF без нулевых строк, номера ведущих столбцов)
    """
    width = _check_rows(matrix, ncols)
    rows = [[Fraction(x) for x in row] for row in matrix]
    pivots: List[int] = []
    r = 0
    for c in range(width):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        lead = rows[r][c]
        rows[r] = [x / lead for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def rank(matrix: Sequence[Sequence[Rational]], ncols: Optional[int] = None) -> int:
    if not matrix and ncols is None:
        return 0
    return len(rref(matrix, ncols)[1])


def nullspace(matrix: Sequence[Sequence[Rational]], ncols: Optional[int] = None) -> List[Tuple[Fraction, ...]]:
    """Базис ядра, по одному вектору на свободный столбец"""
    width = _check_rows(matrix, ncols)
    reduced, pivots = rref(matrix, width)
    free = [c for c in range(width) if c not in pivots]
    basis = []
    for f in free:
        vector = [Fraction(0)] * width
        vector[f] = Fraction(1)
        for row, p in zip(reduced, pivots):
            vector[p] = -row[f]
        basis.append(tuple(vector))
    return basis


@dataclass(frozen=True)
class LinearSolution:
    """Частное решение и базис ядра"""

    solution: Tuple[Fraction, ...]
    nullspace: Tuple[Tuple[Fraction, ...], ...]


def solve_linear(
    matrix: Sequence[Sequence[Rational]],
    rhs: Sequence[Rational],
    ncols: Optional[int] = None,
) -> Optional[LinearSolution]:
    """
    Решить A·x = b точно

    Args:
        matrix: строки A одинаковой длины
        rhs: правая часть b
        ncols: число неизвестных (нужно, если строк нет)

    Returns:
        LinearSolution или None, если система несовместна
    """
    width = _check_rows(matrix, ncols)
    if len(rhs) != len(matrix):
        raise ValidationError("Right-hand side length mismatch", {"rows": len(matrix), "rhs": len(rhs)})
    augmented = [list(row) + [b] for row, b in zip(matrix, rhs)]
    reduced, pivots = rref(augmented, width + 1) if augmented else ([], [])
    if width in pivots:
        return None
    solution = [Fraction(0)] * width
    for row, p in zip(reduced, pivots):
        solution[p] = row[width]
    return LinearSolution(tuple(solution), tuple(nullspace(matrix, width)))


def determinant(matrix: Sequence[Sequence[Rational]]) -> Fraction:
    """Определитель квадратной матрицы исключением Гаусса"""
    size = len(matrix)
    if any(len(row) != size for row in matrix):
        raise ValidationError("Determinant needs a square matrix", {"rows": size})
    rows = [[Fraction(x) for x in row] for row in matrix]
    result = Fraction(1)
    for c in range(size):
        pivot = next((i for i in range(c, size) if rows[i][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            rows[c], rows[pivot] = rows[pivot], rows[c]
            result = -result
        lead = rows[c][c]
        result *= lead
        for i in range(c + 1, size):
            if rows[i][c] != 0:
                factor = rows[i][c] / lead
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[c])]
    return result


def inverse(matrix: Sequence[Sequence[Rational]]) -> List[List[Fraction]]:
    """
    Обратная матрица

    Raises:
        ValidationError: вырожденная матрица
    """
    size = len(matrix)
    augmented = [
        [Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(size)]
        for i, row in enumerate(matrix)
    ]
    reduced, pivots = rref(augmented, 2 * size)
    if pivots[:size] != list(range(size)):
        raise ValidationError("Matrix is singular", {"size": size})
    return [row[size:] for row in reduced[:size]]


def is_integral(matrix: Iterable[Iterable[Rational]]) -> bool:
    return all(Fraction(x).denominator == 1 for row in matrix for x in row)


class MultiPoly:
    """
    Разреженный многочлен от N переменных с рациональными коэффициентами

    Хранится как словарь {мультииндекс: коэффициент}; нулевые коэффициенты не хранятся,
    поэтому равенство проверяется сравнением словарей.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Optional[Mapping[Exponent, Rational]] = None):
        self.nvars = nvars
        clean: Dict[Exponent, Rational] = {}
        for exponent, coefficient in (terms or {}).items():
            if len(exponent) != nvars:
                raise ValidationError("Exponent length mismatch", {"nvars": nvars, "exponent": list(exponent)})
            if coefficient != 0:
                clean[tuple(exponent)] = _normalize(coefficient)
        self.terms = clean

    @classmethod
    def zero(cls, nvars: int) -> "MultiPoly":
        return cls(nvars)

    @classmethod
    def constant(cls, nvars: int, value: Rational) -> "MultiPoly":
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, nvars: int, index: int) -> "MultiPoly":
        exponent = [0] * nvars
        exponent[index] = 1
        return cls(nvars, {tuple(exponent): 1})

    @classmethod
    def linear(cls, coefficients: Sequence[Rational], constant: Rational = 0) -> "MultiPoly":
        """Аффинная форма Σ cᵢκᵢ + c₀"""
        nvars = len(coefficients)
        terms: Dict[Exponent, Rational] = {}
        for i, c in enumerate(coefficients):
            if c != 0:
                exponent = [0] * nvars
                exponent[i] = 1
                terms[tuple(exponent)] = c
        if constant != 0:
            terms[(0,) * nvars] = constant
        return cls(nvars, terms)

    def _check(self, other: "MultiPoly") -> None:
        if self.nvars != other.nvars:
            raise ValidationError(
                "Polynomial variable-count mismatch",
                {"left": self.nvars, "right": other.nvars},
            )

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return MultiPoly.constant(self.nvars, other)
        return NotImplemented

    def __add__(self, other) -> "MultiPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms = dict(self.terms)
        for exponent, c in other.terms.items():
            terms[exponent] = terms.get(exponent, 0) + c
        return MultiPoly(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "MultiPoly":
        return (-self) + other

    def __mul__(self, other) -> "MultiPoly":
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if other == 0:
                return MultiPoly.zero(self.nvars)
            return MultiPoly(self.nvars, {e: c * other for e, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms: Dict[Exponent, Rational] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exponent = tuple(a + b for a, b in zip(e1, e2))
                terms[exponent] = terms.get(exponent, 0) + c1 * c2
        return MultiPoly(self.nvars, terms)

    __rmul__ = __mul__

    def __truediv__(self, scalar: Rational) -> "MultiPoly":
        return self * (Fraction(1) / to_rational(scalar))

    def __eq__(self, other) -> bool:
        if isinstance(other, MultiPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == MultiPoly.constant(self.nvars, other)
        return NotImplemented

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Полная степень; для нулевого многочлена −1"""
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self, degree: int) -> bool:
        return all(sum(e) == degree for e in self.terms)

    def coefficient(self, exponent: Exponent) -> Rational:
        return self.terms.get(tuple(exponent), 0)

    def evaluate(self, point: Sequence[Rational]) -> Fraction:
        if len(point) != self.nvars:
            raise ValidationError("Point dimension mismatch", {"nvars": self.nvars, "point": len(point)})
        values = [to_rational(x) for x in point]
        total = Fraction(0)
        for exponent, c in self.terms.items():
            term = Fraction(c)
            for x, power in zip(values, exponent):
                if power:
                    term *= x ** power
            total += term
        return total

    def partial(self, index: int) -> "MultiPoly":
        """Частная производная по κ_index"""
        terms: Dict[Exponent, Rational] = {}
        for exponent, c in self.terms.items():
            power = exponent[index]
            if power:
                lowered = list(exponent)
                lowered[index] = power - 1
                terms[tuple(lowered)] = c * power
        return MultiPoly(self.nvars, terms)

    def specialize(self, assignment: Mapping[int, Rational]) -> "MultiPoly":
        """Подставить значения части переменных; число переменных не меняется"""
        terms: Dict[Exponent, Rational] = {}
        for exponent, c in self.terms.items():
            value = Fraction(c)
            reduced = list(exponent)
            for index, x in assignment.items():
                if reduced[index]:
                    value *= to_rational(x) ** reduced[index]
                    reduced[index] = 0
            key = tuple(reduced)
            terms[key] = terms.get(key, 0) + value
        return MultiPoly(self.nvars, terms)

    def sorted_terms(self) -> List[Tuple[Exponent, Rational]]:
        return sorted(self.terms.items(), reverse=True)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exponent, c in self.sorted_terms():
            monomial = "*".join(
                f"k{i + 1}" if p == 1 else f"k{i + 1}^{p}" for i, p in enumerate(exponent) if p
            )
            coefficient = format_rational(c)
            parts.append(f"{coefficient}*{monomial}" if monomial else coefficient)
        return " + ".join(parts)


def poly_is_zero(p: MultiPoly) -> bool:
    return p.is_zero()


def poly_add(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    return p + q


def poly_mul(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    return p * q


def poly_eval(p: MultiPoly, point: Sequence[Rational]) -> Fraction:
    return p.evaluate(point)


def poly_determinant(matrix: Sequence[Sequence[MultiPoly]]) -> MultiPoly:
    """Определитель матрицы из многочленов разложением Лейбница"""
    size = len(matrix)
    if size == 0:
        raise ValidationError("Empty polynomial matrix")
    nvars = matrix[0][0].nvars
    total = MultiPoly.zero(nvars)
    for perm in permutations(range(size)):
        inversions = sum(1 for i in range(size) for j in range(i + 1, size) if perm[i] > perm[j])
        term = MultiPoly.constant(nvars, -1 if inversions % 2 else 1)
        for row, column in enumerate(perm):
            entry = matrix[row][column]
            if entry.is_zero():
                term = None
                break
            term = term * entry
        if term is not None:
            total = total + term
    return total
