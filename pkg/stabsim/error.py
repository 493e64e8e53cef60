import sys

from .defaults import __colors__


class StabsimError(Exception):
    pass


class TopologyError(StabsimError):
    pass


class GraphParseError(TopologyError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = 'line %d: %s' % (line, message)
        super().__init__(message)


class ConfigurationError(StabsimError):
    pass


class ParenthesisError(StabsimError):
    pass


class UsageError(StabsimError):
    pass


class RuleNotEnabled(StabsimError):
    """
    Raised when a rule is applied at a process whose guard does not hold.
    """
    def __init__(self, process, rule, enabled=()):
        self.process = process
        self.rule = rule
        self.enabled = tuple(enabled)
        names = ', '.join(r.value for r in self.enabled) or 'none'
        super().__init__('rule %s is not enabled at process %d (enabled: %s)' % (
            getattr(rule, 'value', rule), process, names))


class ScheduleViolation(StabsimError):
    """
    A scripted move-set that cannot be executed at its step.
    """
    def __init__(self, step, move, reason):
        self.step = step
        self.move = move
        self.reason = reason
        super().__init__('step %d: %s (%s)' % (step, reason, move))


class ScheduleExhausted(StabsimError):
    def __init__(self, step):
        self.step = step
        super().__init__('schedule exhausted at step %d before termination' % step)


class ReplayDivergence(StabsimError):
    def __init__(self, step, reason):
        self.step = step
        self.reason = reason
        super().__init__('replay diverged at step %d: %s' % (step, reason))


class ScenarioError(StabsimError):
    """
    Construction bug in a scenario generator, with the coordinates of the failing phase.
    """
    def __init__(self, message, phase=None):
        self.phase = phase
        if phase is not None:
            message = '%s [phase i=%d, v=%d, z=%d]' % ((message,) + tuple(phase))
        super().__init__(message)


class CapExceeded(StabsimError):
    def __init__(self, size, cap):
        self.size = size
        self.cap = cap
        super().__init__('state space of %d configurations exceeds the cap %d' % (size, cap))


def os_error(report, _output):
    """
    Display an I/O or system report
    """
    if report is None: return
    if type(report) is not str: report = str(report)
    _output('OSError: ' + report, __colors__["error"])


def command_error(report, _output):
    _output("stabsim (most recent call last):", __colors__["error"])
    _output("CommandError: command '%s' is not defined" % str(report), __colors__["error"])


def parenthesis_error(_output):
    _output('SyntaxError: unmatched group separator found in expression', __colors__["error"])


def syntax_error(report, _output):
    _output('SyntaxError: incoherent use of %s' % str(report), __colors__["error"])


def args_error(report, _output):
    _output('ArgumentError: invalid arguments (%s)' % str(report), __colors__["error"])


def usage_error(report, _output):
    _output('UsageError: %s' % str(report), __colors__["error"])


def stderr_output(text, color=None):
    """
    Default `_output` callable: writes one line to standard error, colored when it is a tty.
    """
    if color is not None and sys.stderr.isatty():
        text = '\033[%sm%s\033[0m' % (color, text)
    sys.stderr.write(text + '\n')
