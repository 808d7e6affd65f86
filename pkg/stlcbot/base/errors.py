"""
Error classes.
"""


class STLcBOTError(Exception):
    """
    Base exception class.
    """

    def __init__(self, message, *params, **key_params):
        """
        Constructor

        :param message: Error message.
        :type message: string

        :param params: Optional arguments for formatting.
        :type params: list

        :param key_params: Named arguments for formatting.
        :type key_params: dict
        """

        self.message = None
        """ Error message
        :type: string """

        if params or key_params:
            self.message = message.format(*params, **key_params)
        else:
            self.message = message

        Exception.__init__(self, self.message)

    def __str__(self):
        """
        Returns the error message string.

        :return: The error message
        :rtype: string
        """

        return self.message


class ParseError(STLcBOTError):
    """
    Exception class to signal errors found while parsing a formula.
    """

    def __init__(self, message, line, column):
        STLcBOTError.__init__(
            self, "{0} (line {1}, column {2})", message, line, column
        )

        self.line = line
        """ Line of the offending token, 1-based.
        :type: int """

        self.column = column
        """ Column of the offending token, 1-based.
        :type: int """


class FormulaError(STLcBOTError):
    """
    Exception class to signal an invalid formula or predicate.
    """

    pass


class EvaluationError(STLcBOTError):
    """
    Exception class to signal a formula evaluated outside its domain.
    """

    pass


class HorizonError(EvaluationError):
    """
    Exception class to signal a monitor queried before its window is covered.
    """

    pass


class ModelError(STLcBOTError):
    """
    Exception class to signal errors in creating models, environments
    and scenarios.
    """

    pass


class SchemaError(ModelError):
    """
    Exception class to signal a malformed scenario or configuration file.
    """

    def __init__(self, path, message, *params):
        ModelError.__init__(self, "{0}: {1}", path, message.format(*params))

        self.path = path
        """ Dotted path of the offending field.
        :type: str """


class GPError(STLcBOTError):
    """
    Exception class to signal a covariance matrix that cannot be factored.
    """

    pass


class SimError(STLcBOTError):
    """
    Exception class to signal errors in integrating robot dynamics.
    """

    pass


class PlanError(STLcBOTError):
    """
    Exception class to signal errors in planning.
    """

    pass


class WindowFailure(PlanError):
    """
    Raised when no candidate of a control window has a finite evaluation.
    """

    pass


class BenchError(STLcBOTError):
    """
    Exception class to signal errors in the benchmark harness.
    """

    pass
