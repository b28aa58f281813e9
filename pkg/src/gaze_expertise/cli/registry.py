# File: src/gaze_expertise/cli/registry.py

from argparse import ArgumentParser
from typing import Any, Callable, Dict

from pydantic import BaseModel

COMMANDS: Dict[str, "Command"] = {}


class Command(BaseModel):
    """A CLI subcommand created from a function; name and help come from the function."""
    name: str
    description: str
    func: Callable
    arguments: Callable[[ArgumentParser], None] | None = None

    def run(self, *args: Any, **kwargs: Any) -> Any:
        return self.func(*args, **kwargs)


def command(arguments: Callable[[ArgumentParser], None] | None = None) -> Callable[[Callable], Command]:
    """
    A decorator that registers `cmd_<name>` as subcommand `<name>`.
    `arguments` adds the subcommand's own flags to its parser.
    """

    def register(func: Callable) -> Command:
        name = func.__name__.removeprefix("cmd_")
        cmd = Command(name=name, description=(func.__doc__ or "").strip(), func=func, arguments=arguments)
        COMMANDS[name] = cmd
        return cmd

    return register
