"""Exception hierarchy shared by every mlab module."""


class MlabError(Exception):
    pass


# group construction

class ClosureExceedsCap(MlabError):
    pass


class InvalidPermutation(MlabError):
    pass


class InvalidTable(MlabError):
    pass


class NotPrime(MlabError):
    pass


class NotNormal(MlabError):
    pass


# linear algebra

class InfiniteQuotient(MlabError):
    pass


class NotSubmodule(MlabError):
    pass


# cohomology

class CapExceeded(MlabError):
    pass


class SubmoduleViolation(MlabError):
    """An action matrix failed to preserve a submodule it must preserve."""


class NotWellDefined(MlabError):
    """A cochain map failed to send cocycles/coboundaries where it should."""


# catalog / cli

class GroupFileError(MlabError):
    """Parse error carrying a 1-based line and column."""

    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class GroupSyntaxError(GroupFileError):
    pass


class DuplicateName(GroupFileError):
    pass


class BadPermutation(GroupFileError):
    pass


class BadTable(GroupFileError):
    pass


class CorruptCache(MlabError):
    pass
