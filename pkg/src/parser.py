"""Text input layer for multilinear polynomials.

Grammar (whitespace ignored):

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := [coefficient ['*']] factor (['*'] factor)*  |  coefficient
    factor := variable | '[' expr ',' expr ']' | '(' expr ')'

Variables are x1..x8; x, y, z alias x1, x2, x3. Coefficients are integers
or p/q literals. Brackets expand to commutators before the multilinearity
check, so nested input such as "[x,[z,y]]" is accepted verbatim.
"""
from __future__ import annotations

from functools import lru_cache

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, VisitError

from .freealg import MAX_DEGREE, MultilinearPoly, Words, words_add, words_bracket, words_mul
from .ring import InvalidRingSpec, NotInvertible, PolyImageError, RingSpec

GRAMMAR = r"""
    start: expr

    expr: signed (ADDOP term)*
    signed: ADDOP? term

    term: COEFF ("*"? factor)*      -> coeff_term
        | factor ("*"? factor)*     -> plain_term

    ?factor: NAME                   -> var
           | "[" expr "," expr "]"  -> bracket
           | "(" expr ")"

    ADDOP: "+" | "-"
    COEFF: /\d+(\/\d+)?/
    NAME: /[a-zA-Z_][a-zA-Z_0-9]*/

    %import common.WS
    %ignore WS
"""

ALIASES = {"x": 1, "y": 2, "z": 3}


class PolySyntaxError(PolyImageError):
    """Raised on malformed polynomial text; `position` is a 0-based offset."""

    exit_code = 2

    def __init__(self, message: str, position: int | None = None):
        super().__init__(message if position is None else f"{message} (at position {position})")
        self.position = position


@lru_cache(maxsize=1)
def _parser() -> Lark:
    return Lark(GRAMMAR, parser="lalr")


def variable_index(name: str) -> int | None:
    if name in ALIASES:
        return ALIASES[name]
    if name.startswith("x") and name[1:].isdigit():
        k = int(name[1:])
        if 1 <= k <= MAX_DEGREE:
            return k
    return None


class _ToWords(Transformer):
    def __init__(self, ring: RingSpec):
        super().__init__()
        self.ring = ring
        self.spelled: dict[int, str] = {}

    def start(self, items) -> Words:
        return items[0]

    def var(self, items) -> Words:
        (tok,) = items
        k = variable_index(str(tok))
        if k is None:
            raise PolySyntaxError(f"unknown variable {str(tok)!r}", tok.start_pos)
        self.spelled.setdefault(k, str(tok))
        return {(k,): self.ring.canon(1)}

    @v_args(inline=True)
    def bracket(self, a: Words, b: Words) -> Words:
        return words_bracket(self.ring, a, b)

    def _product(self, factors) -> Words:
        acc: Words = {(): self.ring.canon(1)}
        for f in factors:
            acc = words_mul(self.ring, acc, f)
        return acc

    def coeff_term(self, items) -> Words:
        tok, *factors = items
        try:
            c = self.ring.parse_value(str(tok))
        except (InvalidRingSpec, NotInvertible) as exc:
            raise PolySyntaxError(str(exc), tok.start_pos) from exc
        return {w: self.ring.mul(c, v) for w, v in self._product(factors).items()}

    def plain_term(self, items) -> Words:
        return self._product(items)

    def signed(self, items) -> Words:
        if len(items) == 2:
            sign, term = items
            return words_add(self.ring, {}, term, sign=-1 if sign == "-" else 1)
        return items[0]

    def expr(self, items) -> Words:
        acc = items[0]
        for op, term in zip(items[1::2], items[2::2]):
            acc = words_add(self.ring, acc, term, sign=-1 if op == "-" else 1)
        return acc


def _expand(text: str, ring: RingSpec) -> tuple[Words, dict[int, str]]:
    try:
        tree = _parser().parse(text)
    except UnexpectedCharacters as exc:
        raise PolySyntaxError(f"unexpected character {text[exc.pos_in_stream]!r}", exc.pos_in_stream) from exc
    except UnexpectedEOF as exc:
        raise PolySyntaxError("unexpected end of input", len(text)) from exc
    except UnexpectedInput as exc:
        token = getattr(exc, "token", None)
        if isinstance(token, Token) and token.type == "$END":
            raise PolySyntaxError("unexpected end of input", len(text)) from exc
        pos = token.start_pos if isinstance(token, Token) and token.start_pos is not None else exc.pos_in_stream
        raise PolySyntaxError(f"unexpected token {str(token)!r}", pos) from exc
    transformer = _ToWords(ring)
    try:
        words = transformer.transform(tree)
    except VisitError as exc:
        if isinstance(exc.orig_exc, PolyImageError):
            raise exc.orig_exc from None
        raise
    return words, transformer.spelled


def parse_words(text: str, ring: RingSpec) -> Words:
    """Expand `text` into free-algebra words without the multilinearity check."""
    return _expand(text, ring)[0]


def _names_for_errors(spelled: dict[int, str]) -> dict[int, str]:
    # input written with x, y, z gets x, y, z back for variables it left out too
    if any(name in ALIASES for name in spelled.values()):
        return {**{k: name for name, k in ALIASES.items()}, **spelled}
    return spelled


def parse_poly(text: str, ring: RingSpec) -> MultilinearPoly:
    """Parse `text` into canonical permutation-indexed form."""
    if not text.strip():
        raise PolySyntaxError("empty polynomial", 0)
    words, spelled = _expand(text, ring)
    return MultilinearPoly.from_words(words, ring, names=_names_for_errors(spelled))
