import functools
import inspect
import json
import os
import pathlib

from .defaults import __colors__, __exit_codes__, __mutations__
from .version import __version__ as version

temp = os.path.dirname(__file__)
PYMAINDIR = str(pathlib.Path(temp).resolve())


@functools.lru_cache(maxsize=None)
def load_settings() -> dict:
    """
    Package settings from `config.json`, under the names the code uses.
    """
    with open(os.path.join(PYMAINDIR, 'config.json')) as config:
        data = json.load(config)
    return {
        "seed": data['seed'],
        "snapshot_interval": data['snapshotinterval'],
        "explore_cap": data['explorecap'],
        "budget_cap": data['budgetcap'],
        "u_cap_factor": data['ucapfactor'],
        "activation_prob": data['activationprob'],
        "verbose": data['toggleverbose'],
        "jobs": data['jobs'],
    }


class Utils:
    """
    Console helpers shared by every command, such as help, usage, license...
    """
    def __init__(self, output: callable) -> None:
        """
        Constructs and returns a new :class:`Utils`.
        """
        self._ConsoleOutput: callable = output
        self._command_dictionary: dict = {}

    @property
    def command_dictionary(self) -> dict:
        """
        `Utils._command_dictionary` getter
        """
        return self._command_dictionary

    @command_dictionary.setter
    def command_dictionary(self, command_dict: dict) -> None:
        """
        `Utils._command_dictionary` setter
        """
        self._command_dictionary = command_dict

    def usage(self, command_name):
        '''
        Provides help concerning a given command
        '''
        try:
            i = self._command_dictionary[command_name]
        except KeyError:  # not in the dictionary
            self._ConsoleOutput("Unknown command '%s'" % str(command_name), __colors__["error"])
            return __exit_codes__["usage"]
        self._ConsoleOutput("Help concerning command '%s':" % str(command_name), __colors__["info"])
        self._ConsoleOutput("- associated function name is '%s'" % str(i.__name__))
        self._ConsoleOutput("- Documentation provided: ")
        doc = inspect.getdoc(i)
        if doc is not None:
            self._ConsoleOutput(self._text_to_line(doc).strip())
        else:
            self._ConsoleOutput("No docstring found", __colors__["warning"])
        arg = ', '.join(str(p) for p in inspect.signature(i).parameters.values())
        self._ConsoleOutput("- Known arguments: " + (arg if arg else "none"))
        return __exit_codes__["ok"]

    def help(self):
        '''
        Shows a list of available commands
        '''
        self._ConsoleOutput("stabsim %s, list of available commands: " % version, __colors__["info"])
        for i in self._command_dictionary:
            self._ConsoleOutput("- " + str(i))
        self._ConsoleOutput("Known rule-set mutations: " + ', '.join(sorted(__mutations__)))
        self._ConsoleOutput("Use 'usage <command>' for more details on a specific command")
        return __exit_codes__["ok"]

    def show_license(self):
        with open(os.path.join(PYMAINDIR, 'license.txt')) as l:
            _license = l.read()
        self._ConsoleOutput(_license)
        return __exit_codes__["ok"]

    def _text_to_line(self, text):
        return ' '.join(text.split())
