"""
Formula parser.

Grammar (whitespace-insensitive)::

    formula  := or
    or       := and ('|' and)*
    and      := until ('&' until)*
    until    := unary ('U' interval unary)*
    unary    := '!' unary | 'G' interval unary | 'F' interval unary
              | 'agent' '(' int ')' ':' unary | primary
    primary  := 'true' | '(' or ')' | atom
    atom     := 'dist' '(' int ',' num ',' num ')' '>' num
              | 'distbox' '(' int ',' num ',' num ',' num ',' num ')' '>' num
              | 'pairdist' '(' int ',' int ')' '>' num
              | 'half' '(' int ',' num ',' num ')' '>' num
              | 'goal' '(' int [',' num ',' num] ')' '<' num
    interval := '[' num ',' num ']'
"""

import math

from stlcbot.base.base import STLcBOTBase
from stlcbot.base.errors import FormulaError, ParseError
from stlcbot.model.formula import (
    AgentAtom,
    Always,
    And,
    Atom,
    DistToBoxAbove,
    DistToPointAbove,
    Eventually,
    HalfSpace,
    Not,
    Or,
    PairwiseDistAbove,
    TrueFormula,
    Until,
    WithinGoalRadius,
)

symbols = "()[],:!&|<>"

predicate_table = {
    "dist": (DistToPointAbove, 3, ">"),
    "distbox": (DistToBoxAbove, 5, ">"),
    "pairdist": (PairwiseDistAbove, 2, ">"),
    "half": (HalfSpace, 3, ">"),
    "goal": (WithinGoalRadius, None, "<"),
}
""" Predicate keyword -> (class, argument count, comparison).
:type: dict """


class Token(object):
    NUMBER = "number"
    NAME = "name"
    SYMBOL = "symbol"
    END = "end"

    def __init__(self, type, text, line, column):
        self.type = type
        self.text = text
        self.line = line
        self.column = column

    def __repr__(self):
        return "{0}({1!r}@{2}:{3})".format(self.type, self.text, self.line, self.column)


class FormulaParser(STLcBOTBase):
    """
    Parser class for formula strings.
    """

    def __init__(self, parse_string):
        """
        Constructor.

        :param parse_string: Formula to be parsed.
        :type parse_string: string
        """

        self.parse_string = parse_string
        """ Formula to be parsed.
        :type: string """

        self.token_list = None
        """ Tokens of the formula.
        :type: list(stlcbot.parser.stl.Token) """

        self.pos = 0

    def tokenize(self):
        """
        Tokenizes the string stored in the parser object into a list
        of tokens.
        """

        self.token_list = []
        ps = self.parse_string

        i = 0
        line = 1
        line_start = 0

        while i < len(ps):
            c = ps[i]
            column = i - line_start + 1

            if c == "\n":
                line += 1
                line_start = i + 1
                i += 1
            elif c.isspace():
                i += 1
            elif c.isalpha() or c == "_":
                token = ""
                while i < len(ps) and (ps[i].isalnum() or ps[i] == "_"):
                    token += ps[i]
                    i += 1
                self.token_list.append(Token(Token.NAME, token, line, column))
            elif (
                c.isdigit()
                or (c == "." and i + 1 < len(ps) and ps[i + 1].isdigit())
                or (
                    c in "+-"
                    and i + 1 < len(ps)
                    and (ps[i + 1].isdigit() or ps[i + 1] == ".")
                )
            ):
                token = c
                i += 1
                while i < len(ps) and (
                    ps[i].isdigit()
                    or ps[i] == "."
                    or ps[i] in "eE"
                    or (ps[i] in "+-" and ps[i - 1] in "eE")
                ):
                    token += ps[i]
                    i += 1
                try:
                    float(token)
                except ValueError:
                    raise ParseError("Malformed number '{0}'".format(token), line, column)
                self.token_list.append(Token(Token.NUMBER, token, line, column))
            elif c in symbols:
                self.token_list.append(Token(Token.SYMBOL, c, line, column))
                i += 1
            else:
                raise ParseError("Unexpected character '{0}'".format(c), line, column)

        column = len(ps) - line_start + 1
        self.token_list.append(Token(Token.END, "", line, column))

    def peek(self):
        return self.token_list[self.pos]

    def next(self):
        token = self.token_list[self.pos]
        if token.type != Token.END:
            self.pos += 1
        return token

    def fail(self, message, token=None):
        token = token or self.peek()
        raise ParseError(message, token.line, token.column)

    def at(self, text, type=None):
        token = self.peek()
        return token.text == text and (type is None or token.type == type)

    def expect(self, text):
        token = self.peek()
        if token.text != text or token.type not in (Token.SYMBOL, Token.NAME):
            found = token.text if token.type != Token.END else "end of input"
            self.fail("Expected '{0}', found '{1}'".format(text, found))
        return self.next()

    def number(self):
        token = self.peek()
        if token.type != Token.NUMBER:
            self.fail("Expected a number, found '{0}'".format(token.text))
        self.next()
        value = float(token.text)
        if not math.isfinite(value):
            self.fail("Number '{0}' is out of range".format(token.text), token)
        return value

    def integer(self):
        token = self.peek()
        value = self.number()
        if value != int(value) or value < 0:
            self.fail("Expected a robot index, found '{0}'".format(token.text), token)
        return int(value)

    def interval(self):
        start = self.expect("[")
        a = self.number()
        self.expect(",")
        b = self.number()
        self.expect("]")
        if a < 0 or a > b:
            self.fail("Malformed interval [{0}, {1}]".format(a, b), start)
        return a, b

    def parse(self):
        """
        Parses the formula.

        :return: The formula tree.
        :rtype: stlcbot.model.formula.Formula
        """

        self.tokenize()
        self.pos = 0
        f = self.parse_or()
        if self.peek().type != Token.END:
            self.fail("Unexpected '{0}'".format(self.peek().text))
        return f

    def parse_or(self):
        f = self.parse_and()
        while self.at("|", Token.SYMBOL):
            self.next()
            f = Or(f, self.parse_and())
        return f

    def parse_and(self):
        f = self.parse_until()
        while self.at("&", Token.SYMBOL):
            self.next()
            f = And(f, self.parse_until())
        return f

    def parse_until(self):
        f = self.parse_unary()
        while self.at("U", Token.NAME):
            self.next()
            a, b = self.interval()
            f = Until(a, b, f, self.parse_unary())
        return f

    def parse_unary(self):
        token = self.peek()

        if token.type == Token.SYMBOL and token.text == "!":
            self.next()
            return Not(self.parse_unary())

        if token.type == Token.NAME and token.text in ("G", "F"):
            self.next()
            a, b = self.interval()
            child = self.parse_unary()
            return Always(a, b, child) if token.text == "G" else Eventually(a, b, child)

        if token.type == Token.NAME and token.text == "agent":
            self.next()
            self.expect("(")
            robot = self.integer()
            self.expect(")")
            self.expect(":")
            child = self.parse_unary()
            try:
                return AgentAtom(robot, child)
            except FormulaError as e:
                self.fail(e.message, token)

        return self.parse_primary()

    def parse_primary(self):
        token = self.peek()

        if token.type == Token.NAME and token.text == "true":
            self.next()
            return TrueFormula()

        if token.type == Token.SYMBOL and token.text == "(":
            self.next()
            f = self.parse_or()
            self.expect(")")
            return f

        if token.type == Token.NAME:
            return self.parse_atom()

        found = token.text if token.type != Token.END else "end of input"
        self.fail("Expected a formula, found '{0}'".format(found))

    def parse_atom(self):
        token = self.next()
        if token.text not in predicate_table:
            self.fail("Unknown predicate kind '{0}'".format(token.text), token)

        cls, arity, comparison = predicate_table[token.text]

        self.expect("(")
        robot = self.integer()
        args = []
        if token.text == "pairdist":
            self.expect(",")
            args.append(self.integer())
        while self.at(",", Token.SYMBOL):
            self.next()
            args.append(self.number())
        self.expect(")")

        self.expect(comparison)
        value = self.number()

        try:
            if token.text == "goal":
                if len(args) not in (0, 2):
                    self.fail("goal() takes a robot index and an optional x, y", token)
                goal = tuple(args) if args else None
                return Atom(WithinGoalRadius(robot, value, goal))
            if len(args) + 1 != arity:
                self.fail(
                    "{0}() takes {1} arguments, got {2}".format(
                        token.text, arity, len(args) + 1
                    ),
                    token,
                )
            return Atom(cls(robot, *(args + [value])))
        except FormulaError as e:
            self.fail(e.message, token)


def parse_formula(text):
    """
    Parses a formula string.

    :param text: Formula in the concrete syntax.
    :type text: str

    :return: The formula tree.
    :rtype: stlcbot.model.formula.Formula
    """

    return FormulaParser(text).parse()
