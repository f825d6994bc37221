"""Enhanced error handling with helpful messages"""
from utils.system.ui import print_error, print_substep


# Exit-status contract of the command line runner
EXIT_OK = 0
EXIT_INVARIANT_FAILURE = 1
EXIT_USAGE = 2
EXIT_IO = 3


class GeoPursuitError(Exception):
    """Base exception for simulator and verification errors"""

    exit_code = EXIT_INVARIANT_FAILURE

    def __init__(self, message, solution=None, exit_code=None):
        self.message = message
        self.solution = solution
        if exit_code is not None:
            self.exit_code = exit_code
        super().__init__(self.message)

    def display(self):
        """Display error with helpful information"""
        print_error(self.message)

        if self.solution:
            print_substep("\n[SOLUTION]")
            if isinstance(self.solution, list):
                for i, sol in enumerate(self.solution, 1):
                    print_substep(f"{i}. {sol}")
            else:
                print_substep(self.solution)


class ContractViolation(GeoPursuitError):
    """A precondition of a geometric operation does not hold"""
    pass


class UnsupportedOperation(GeoPursuitError):
    """The operation is not available for this space or domain"""
    pass


class IllegalMove(GeoPursuitError):
    """A man strategy emitted a move that breaks the game rules"""

    def __init__(self, step_index, message, solution=None):
        self.step_index = step_index
        super().__init__(f"Illegal move at step {step_index}: {message}", solution=solution)


class ConfigError(GeoPursuitError):
    """Malformed, unknown or missing run setting"""

    exit_code = EXIT_USAGE

    def __init__(self, key, message, line=None, solution=None):
        self.key = key
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"Invalid setting '{key}'{where}: {message}", solution=solution)


class OutputError(GeoPursuitError):
    """Artifact could not be written"""

    exit_code = EXIT_IO


def handle_output_error(error, path):
    """Translate file system errors into OutputError with helpful messages"""
    error_msg = str(error).lower()

    if 'permission' in error_msg or 'access' in error_msg:
        raise OutputError(
            f"Permission denied writing {path}",
            solution=[
                "Check if the output directory is writable",
                "Pick another location with --output-dir",
            ]
        ) from error

    elif 'no such file' in error_msg or 'not a directory' in error_msg:
        raise OutputError(
            f"Output location does not exist: {path}",
            solution=[
                "Create the parent directory first",
                "Or let the runner use the default output/ directory",
            ]
        ) from error

    else:
        raise OutputError(
            f"Failed to write {path}: {error}",
            solution=[
                "Make sure enough disk space is available",
                "Check that the path is not open in another program",
            ]
        ) from error
