"""This module reads and writes linear constraints

Textual syntax (used by the cli, by 05_phi.txt and in tests):

    atom        = <expr> <rel> <expr> [<rel> <expr> ...]   (chains allowed)
    rel         = < | <= | = | == | >= | > | ≤ | ≥
    expr        = sums of <number>, <identifier> and <number> * <identifier>
                  numbers may be written 3, -2, 1/2 or 0.25
    constraint  = | true | false | <atom>
                  | not <constraint>
                  | <constraint> & <constraint>      (also "and", "∧")
                  | <constraint> | <constraint>      (also "or", "∨")
                  | (<constraint>)

"&" binds tighter than "|". Constraints are evaluated into a PolyUnion
over a given variable set.

JSON form: an atom is {"coeffs": {"p2": 1}, "const": "-1/2", "rel": "<"}
meaning p2 - 1/2 < 0, a union is {"variables": [...], "disjuncts": [[atom...]...]}
"""

from fractions import Fraction
from typing import Any, Dict, Iterable, List, Mapping, Tuple

from .defs import Relation, is_rational, json_number, to_fraction
from .errors import ModelError
from .polyhedra import (
    ConvexPolyhedron,
    LinearInequality,
    PolyUnion,
    Var,
    conjoin,
    negate_union,
)

SINGLE_CHAR_OPERATORS = "()&|+-*<>=≤≥∧∨"
DOUBLE_CHAR_OPERATORS = ["<=", ">=", "=="]
RELATIONS = ["<", "<=", "=", "==", ">=", ">", "≤", "≥"]
WORD_OPERATORS = {"and": "&", "or": "|", "∧": "&", "∨": "|"}


def constraint_lexer(string: str) -> List[str]:
    """lexes the input string into a stream of tokens"""
    lexemes: List[str] = []
    current_lexeme = ""
    str_len = len(string)
    i = 0
    while i < str_len:
        char = string[i]
        if i + 1 < str_len and string[i : i + 2] in DOUBLE_CHAR_OPERATORS:
            if current_lexeme != "":
                lexemes.append(current_lexeme)
            lexemes.append(string[i : i + 2])
            current_lexeme = ""
            i += 1
        elif char in SINGLE_CHAR_OPERATORS:
            if current_lexeme != "":
                lexemes.append(current_lexeme)
            lexemes.append(char)
            current_lexeme = ""
        elif char.isspace():
            if current_lexeme != "":
                lexemes.append(current_lexeme)
            current_lexeme = ""
        else:
            current_lexeme += char
        i += 1
    if current_lexeme:
        lexemes.append(current_lexeme)
    return [WORD_OPERATORS.get(lexeme, lexeme) for lexeme in lexemes]


def _syntax_error(message: str) -> ModelError:
    return ModelError("invalid-constraint", "invalid constraint syntax.\n" + message)


def find_matching_close_parenthese(tokens: List[str], start_index: int) -> int:
    """finds the ")" matching the opening parenthese "(" found at
    tokens[start_index]. returns len(tokens) if none exists"""
    j = start_index + 1
    depth = 0
    len_tok = len(tokens)
    while j < len_tok:
        if tokens[j] == "(":
            depth += 1
        if tokens[j] == ")":
            depth -= 1
            if depth == -1:
                break
        j += 1
    return j


def _split_top_level(tokens: List[str], operator: str) -> List[List[str]]:
    """splits tokens on operator, ignoring operators inside parentheses"""
    parts: List[List[str]] = [[]]
    i = 0
    len_tok = len(tokens)
    while i < len_tok:
        tok = tokens[i]
        if tok == "(":
            j = find_matching_close_parenthese(tokens, i)
            if j == len_tok:
                raise _syntax_error('Unmatched "(". (missing closing parenthese?)')
            parts[-1].extend(tokens[i : j + 1])
            i = j
        elif tok == ")":
            raise _syntax_error('Unmatched ")". (missing opening parenthese?)')
        elif tok == operator:
            parts.append([])
        else:
            parts[-1].append(tok)
        i += 1
    return parts


def constraint_evaluator(tokens: List[str], names: Mapping[str, Var]) -> PolyUnion:
    """evaluates a string of tokens into a PolyUnion"""
    variables = frozenset(names.values())
    if not tokens:
        raise _syntax_error("empty constraint")
    disjuncts = _split_top_level(tokens, "|")
    if len(disjuncts) > 1:
        result = PolyUnion.bottom(variables)
        for part in disjuncts:
            result = PolyUnion.of(
                variables, result.disjuncts + constraint_evaluator(part, names).disjuncts
            )
        return result
    conjuncts = _split_top_level(tokens, "&")
    if len(conjuncts) > 1:
        result = PolyUnion.universe(variables)
        for part in conjuncts:
            result = conjoin(result, constraint_evaluator(part, names))
        return result
    if tokens[0] == "not":
        return negate_union(constraint_evaluator(tokens[1:], names))
    if tokens[0] == "(" and find_matching_close_parenthese(tokens, 0) == len(tokens) - 1:
        return constraint_evaluator(tokens[1:-1], names)
    return simple_constraint_evaluator(tokens, names)


def simple_constraint_evaluator(
    tokens: List[str], names: Mapping[str, Var]
) -> PolyUnion:
    """evaluates true, false or a chain of comparisons
    assumes the tokens contain no "&", "|" and "not\""""
    variables = frozenset(names.values())
    if tokens == ["true"]:
        return PolyUnion.universe(variables)
    if tokens == ["false"]:
        return PolyUnion.bottom(variables)
    sides: List[List[str]] = [[]]
    relations: List[Relation] = []
    for tok in tokens:
        if tok in RELATIONS:
            relations.append(Relation.from_symbol(tok))
            sides.append([])
        else:
            sides[-1].append(tok)
    if not relations:
        raise _syntax_error(
            "expected a comparison, got '{}'\n"
            "simple constraints are: \n"
            "  | true | false\n"
            "  | <expr> <rel> <expr> [<rel> <expr>...]".format(" ".join(tokens))
        )
    atoms = []
    for index, rel in enumerate(relations):
        left_coeffs, left_const = linear_expression(sides[index], names)
        right_coeffs, right_const = linear_expression(sides[index + 1], names)
        coeffs = dict(left_coeffs)
        for var, coeff in right_coeffs.items():
            coeffs[var] = coeffs.get(var, Fraction(0)) - coeff
        atoms.append(LinearInequality.make(coeffs, left_const - right_const, rel))
    return PolyUnion.of(variables, [ConvexPolyhedron.of(variables, atoms)])


def linear_expression(
    tokens: List[str], names: Mapping[str, Var]
) -> Tuple[Dict[Var, Fraction], Fraction]:
    """parses a sum of terms into (coefficients, constant)"""
    if not tokens:
        raise _syntax_error("missing expression around a comparison")
    coeffs: Dict[Var, Fraction] = {}
    constant = Fraction(0)
    sign = 1
    expect_term = True
    i = 0
    len_tok = len(tokens)
    while i < len_tok:
        tok = tokens[i]
        if tok in ("+", "-"):
            if tok == "-":
                sign = -sign
            expect_term = True
            i += 1
            continue
        if not expect_term:
            raise _syntax_error("missing operator before '{}'".format(tok))
        factor = Fraction(1)
        if is_rational(tok):
            factor = to_fraction(tok)
            if i + 1 < len_tok and tokens[i + 1] == "*":
                if i + 2 >= len_tok:
                    raise _syntax_error("missing variable after '*'")
                i += 2
                tok = tokens[i]
            else:
                constant += sign * factor
                sign = 1
                expect_term = False
                i += 1
                continue
        if tok not in names:
            raise ModelError(
                "unknown-variable",
                "unknown variable '{}' (known: {})".format(
                    tok, ", ".join(sorted(names)) or "none"
                ),
            )
        var = names[tok]
        coeffs[var] = coeffs.get(var, Fraction(0)) + sign * factor
        sign = 1
        expect_term = False
        i += 1
    if expect_term:
        raise _syntax_error("expression ends with an operator")
    return coeffs, constant


def parse_constraint(string: str, variables: Iterable[Var]) -> PolyUnion:
    """evaluates a constraint string over the given variables"""
    names = {var.name: var for var in variables}
    return constraint_evaluator(constraint_lexer(string), names)


# ===============================================
# JSON
# ===============================================


def atom_to_json(atom: LinearInequality) -> Dict[str, Any]:
    return {
        "coeffs": {var.name: json_number(coeff) for var, coeff in atom.terms},
        "const": json_number(atom.constant),
        "rel": atom.rel.value,
    }


def atom_from_json(data: Mapping[str, Any], names: Mapping[str, Var]) -> LinearInequality:
    try:
        coeffs = {}
        for name, coeff in data["coeffs"].items():
            if name not in names:
                raise ModelError("unknown-variable", "unknown variable '{}'".format(name))
            coeffs[names[name]] = to_fraction(coeff)
        return LinearInequality.make(
            coeffs, to_fraction(data["const"]), Relation.from_symbol(data["rel"])
        )
    except (KeyError, TypeError, ValueError, AttributeError) as err:
        raise ModelError("invalid-constraint", "malformed atom {}: {}".format(data, err))


def union_to_json(union: PolyUnion) -> Dict[str, Any]:
    return {
        "variables": sorted(var.name for var in union.variables),
        "disjuncts": [
            [atom_to_json(atom) for atom in poly.atoms] for poly in union.disjuncts
        ],
    }


def union_from_json(data: Mapping[str, Any], variables: Iterable[Var]) -> PolyUnion:
    """reads a union, variables gives the kind of every name"""
    declared = frozenset(variables)
    names = {var.name: var for var in declared}
    try:
        listed = sorted(data["variables"])
        disjuncts = data["disjuncts"]
    except (KeyError, TypeError) as err:
        raise ModelError("invalid-constraint", "malformed constraint: {}".format(err))
    if listed != sorted(names):
        raise ModelError(
            "variable-mismatch",
            "constraint ranges over {} but {} was expected".format(
                ", ".join(listed), ", ".join(sorted(names))
            ),
        )
    return PolyUnion.of(
        declared,
        (
            ConvexPolyhedron.of(declared, (atom_from_json(atom, names) for atom in poly))
            for poly in disjuncts
        ),
    )
