"""File housing the polynomial expression grammar and its canonical rendering

Grammar: integer and rational literals, declared identifiers, the constant
token "rt" standing for sqrt(D), the operators + - * ^ with non-negative
integer exponents, and parentheses. Multiplication is never implicit.
"""
# ======== standard imports ========
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Sequence
import logging
import threading
# ==================================

# ======= third party imports ======
import ply.lex as lex
import ply.yacc as yacc
# ==================================

# ========= program imports ========
from orbitstrata.model.base import StrataObject
from orbitstrata.model.exactalg.scalar import Scalar
from orbitstrata.model.exactalg.polynomial import Polynomial
# ==================================

logger = logging.getLogger(__name__)

ROOT_TOKEN = 'rt'


class PolynomialSyntaxError(StrataObject.StrataUserInputException):
    def __init__(self, expr: str, position: int, message: str = '') -> None:
        self.position = position
        pointer = expr + '\n' + ' ' * position + '^'
        super().__init__('expr', f'Syntax error at position {position}. {message}\n{pointer}')


class UnknownIdentifier(StrataObject.StrataUserInputException):
    def __init__(self, name: str, context: Sequence[str]) -> None:
        self.name = name
        super().__init__('expr', f'Identifier {name!r} is not declared in {tuple(context)}.')


class NegativeExponent(StrataObject.StrataUserInputException):
    def __init__(self, exponent: int) -> None:
        super().__init__('expr', f'Exponent {exponent} is negative; only polynomials are allowed.')


class PolynomialParser:
    ''' LALR parser for one variable context and one field '''

    tokens = (
        'RATIONAL', 'INTEGER', 'NAME', 'RT',
        'PLUS', 'MINUS', 'TIMES', 'CARET',
        'LPAREN', 'RPAREN',
    )

    t_PLUS = r'\+'
    t_MINUS = r'-'
    t_TIMES = r'\*'
    t_CARET = r'\^'
    t_LPAREN = r'\('
    t_RPAREN = r'\)'
    t_ignore = ' \t\r\n'

    precedence = (
        ('left', 'PLUS', 'MINUS'),
        ('left', 'TIMES'),
        ('right', 'UMINUS'),
        ('right', 'CARET'),
    )

    def __init__(self, context: Sequence[str], d: int) -> None:
        self.context = tuple(context)
        self.d = d
        if ROOT_TOKEN in self.context:
            raise StrataObject.StrataUserInputException(
                'context', f'{ROOT_TOKEN!r} is reserved for sqrt(D) and cannot name a variable.')
        self._text = ''
        self._lock = threading.Lock()
        self.lexer = lex.lex(module=self)
        self.parser = yacc.yacc(module=self, start='expression', debug=False,
                                write_tables=False, errorlog=yacc.NullLogger())

    # ----- tokens -----
    def t_RATIONAL(self, t):
        r'\d+/\d+'
        num, den = t.value.split('/')
        if int(den) == 0:
            raise PolynomialSyntaxError(self._text, t.lexpos, 'Zero denominator.')
        t.value = Fraction(int(num), int(den))
        return t

    def t_INTEGER(self, t):
        r'\d+'
        t.value = int(t.value)
        return t

    def t_NAME(self, t):
        r'[A-Za-z_][A-Za-z0-9_]*'
        if t.value == ROOT_TOKEN:
            t.type = 'RT'
        return t

    def t_error(self, t):
        raise PolynomialSyntaxError(self._text, t.lexpos, f'Illegal character {t.value[0]!r}.')

    # ----- grammar -----
    def p_expression_binop(self, p):
        '''expression : expression PLUS expression
                      | expression MINUS expression
                      | expression TIMES expression'''
        if p[2] == '+':
            p[0] = p[1] + p[3]
        elif p[2] == '-':
            p[0] = p[1] - p[3]
        else:
            p[0] = p[1] * p[3]

    def p_expression_unary(self, p):
        '''expression : MINUS expression %prec UMINUS
                      | PLUS expression %prec UMINUS'''
        p[0] = -p[2] if p[1] == '-' else p[2]

    def p_expression_power(self, p):
        'expression : expression CARET exponent'
        if p[3] < 0:
            raise NegativeExponent(p[3])
        p[0] = p[1] ** p[3]

    def p_exponent(self, p):
        '''exponent : INTEGER
                    | MINUS INTEGER
                    | LPAREN exponent RPAREN'''
        if len(p) == 2:
            p[0] = p[1]
        elif p[1] == '-':
            p[0] = -p[2]
        else:
            p[0] = p[2]

    def p_expression_group(self, p):
        'expression : LPAREN expression RPAREN'
        p[0] = p[2]

    def p_expression_number(self, p):
        '''expression : INTEGER
                      | RATIONAL'''
        p[0] = Polynomial.constant(p[1], self.context, self.d)

    def p_expression_root(self, p):
        'expression : RT'
        p[0] = Polynomial.constant(Scalar.root(self.d), self.context, self.d)

    def p_expression_name(self, p):
        'expression : NAME'
        if p[1] not in self.context:
            raise UnknownIdentifier(p[1], self.context)
        p[0] = Polynomial.variable(p[1], self.context, self.d)

    def p_error(self, t):
        if t is None:
            raise PolynomialSyntaxError(self._text, len(self._text), 'Unexpected end of input.')
        raise PolynomialSyntaxError(self._text, t.lexpos, f'Unexpected token {t.value!r}.')

    def parse(self, expr: str) -> Polynomial:
        with self._lock:
            self._text = expr
            if not expr.strip():
                raise PolynomialSyntaxError(expr, 0, 'Empty expression.')
            return self.parser.parse(expr, lexer=self.lexer.clone())


@lru_cache(maxsize=64)
def _parser_for(context: tuple[str, ...], d: int) -> PolynomialParser:
    logger.debug('Building expression parser for context %s over Q(sqrt %d)', context, d)
    return PolynomialParser(context, d)


def parse_poly(expr: str, context: Sequence[str], d: int = 0) -> Polynomial:
    StrataObject.check_type('expr', expr, str)
    return _parser_for(tuple(context), d).parse(expr)


def parse_scalar(expr: str, d: int = 0) -> Scalar:
    ''' A constant expression such as "-1/2" or "1/2*rt" '''
    poly = parse_poly(expr, (), d)
    return poly.constant_value()


# ----- rendering -----
def _render_rational(r: Fraction) -> str:
    return str(r)


def _render_coefficient(c: Scalar) -> str:
    ''' Render a non-negative-leading coefficient without its outer sign '''
    if c.b == 0:
        return _render_rational(c.a)
    root = ROOT_TOKEN if abs(c.b) == 1 else f'{_render_rational(abs(c.b))}*{ROOT_TOKEN}'
    if c.a == 0:
        return root
    return f'({_render_rational(c.a)}{"+" if c.b > 0 else "-"}{root})'


def _is_negative(c: Scalar) -> bool:
    # sign of the leading printed component
    return c.a < 0 if c.a != 0 else c.b < 0


def _render_monomial(exponents: Sequence[int], context: Sequence[str]) -> str:
    factors = []
    for name, k in zip(context, exponents):
        if k == 1:
            factors.append(name)
        elif k > 1:
            factors.append(f'{name}^{k}')
    return '*'.join(factors)


def render_poly(f: Polynomial) -> str:
    ''' Canonical text: terms in descending graded lex order '''
    if f.is_zero():
        return '0'
    pieces = []
    for index, (exponents, coeff) in enumerate(f.sorted_terms()):
        negative = _is_negative(coeff)
        magnitude = -coeff if negative else coeff
        monomial = _render_monomial(exponents, f.context)
        if not monomial:
            body = _render_coefficient(magnitude)
        elif magnitude == 1:
            body = monomial
        else:
            body = f'{_render_coefficient(magnitude)}*{monomial}'
        if index == 0:
            pieces.append(f'-{body}' if negative else body)
        else:
            pieces.append(f' - {body}' if negative else f' + {body}')
    return ''.join(pieces)
