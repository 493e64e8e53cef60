from typing import Callable, Dict, List, Optional, Tuple

from .error import (ParenthesisError, StabsimError, args_error, command_error, parenthesis_error,
                    syntax_error, usage_error)

_group_separators = [
    ['(', '{', '['],
    [')', '}', ']']
]


def check_balance(data: str) -> None:
    """
    Raise :class:`ParenthesisError` if the group separators of `data` are unbalanced.
    """
    _balance = []
    for _ in data:
        if _ in _group_separators[0]:
            _balance.append(_)
        elif _ in _group_separators[1]:
            if not _balance or _group_separators[0].index(_balance[-1]) != _group_separators[1].index(_):
                raise ParenthesisError(data)
            del _balance[-1]
    if _balance:
        raise ParenthesisError(data)


def clever_split(string: str) -> List[str]:
    """
    Split a string on the ',' it contains, as long as they are out of a group block
    """
    output_list = []
    start = 0
    depth = 0
    for i, char in enumerate(string):
        if char in _group_separators[0]:
            depth += 1
        elif char in _group_separators[1]:
            depth -= 1
        elif char == ',' and depth == 0:
            output_list.append(string[start:i])
            start = i + 1
    output_list.append(string[start:])
    return output_list


def convert(args_list: list) -> list:
    """
    Convert each element of a given list to the best fitting type (int, float, list, string...).
    Recursive on bracketed groups.
    """
    for _ in range(len(args_list)):
        item = args_list[_].strip()
        if item[:1] in _group_separators[0]:  # branch
            args_list[_] = convert(clever_split(item[1:-1])) if item[1:-1].strip() else []
            continue
        try:
            args_list[_] = int(item)
        except ValueError:
            try:
                args_list[_] = float(item)
            except ValueError:
                args_list[_] = item  # keep a string
    return args_list


def parse_call(data: str) -> Tuple[str, list, dict]:
    """
    Parse the `name:arg,key=value,...` mini-syntax used by `--graph` and
    `--scenario`, e.g. `line:5`, `random:n=6,p=0.4`, `hc-slow:k=3`.
    """
    data = data.strip()
    check_balance(data)
    name, _, rest = data.partition(':')
    name = name.strip()
    if not name:
        raise SyntaxError(data)
    args, kwargs = [], {}
    if not rest.strip():
        return name, args, kwargs
    for chunk in clever_split(rest):
        key, sep, value = chunk.partition('=')
        if sep and key.strip().isidentifier():
            kwargs[key.strip()] = convert([value])[0]
        elif kwargs:
            raise SyntaxError(chunk)  # positional after keyword
        else:
            args.append(convert([chunk])[0])
    return name, args, kwargs


def csl_process(data: str, _output: Callable, _command_dictionary: Dict[str, Callable],
                defaults: Optional[dict] = None):
    """
    Parse `data`, look the name up in `_command_dictionary` and call it.
    Errors are reported through `_output` and None is returned.
    """
    try:
        _command, _args, _kwargs = parse_call(data)
    except ParenthesisError:
        parenthesis_error(_output)
        return None
    except SyntaxError as e:
        syntax_error(e, _output)
        return None
    try:
        _executable = _command_dictionary[_command]
    except KeyError:
        command_error(_command, _output)
        return None
    for key, value in (defaults or {}).items():
        _kwargs.setdefault(key, value)
    try:
        return _executable(*_args, **_kwargs)
    except TypeError as e:
        args_error(e, _output)
    except StabsimError as e:
        usage_error(e, _output)
    return None
