import json
import logging
import sys
from typing import Any, Optional

from sympy import QQ

from coring_cdga.exactla import format_scalar

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def get_logger(name: str) -> logging.Logger:
    """module logger; handlers are configured once by `configure_logging`"""
    return logging.getLogger(name)


def configure_logging(level: str = "WARNING"):
    root = logging.getLogger("coring_cdga")
    if not root.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        root.addHandler(handler)
    root.setLevel(level.upper())


def make_json_serializable(obj: Any) -> Any:
    """recursively convert QQ scalars to "p/q" strings and tuples to lists"""
    if isinstance(obj, dict):
        return {str(key): make_json_serializable(val) for key, val in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [make_json_serializable(val) for val in obj]
    if isinstance(obj, (str, bool)) or obj is None:
        return obj
    if isinstance(obj, int):
        return obj
    if QQ.of_type(obj):
        return format_scalar(obj)
    return str(obj)


def witness_vec(v: dict, labels: Optional[list] = None) -> dict:
    """sparse vector as a JSON-friendly {coordinate: "p/q"} dict, sorted by coordinate"""
    result = {}
    for key in sorted(v):
        name = labels[key] if labels is not None and key < len(labels) else str(key)
        result[name] = format_scalar(v[key])
    return result


def load_json(file_path: str) -> dict:
    """
    read a json file into a dict; "-" reads stdin

    :param file_path: path to the json file
    :return: dictionary from json.loads
    """
    if file_path == "-":
        return json.loads(sys.stdin.read())
    with open(file_path, "r", encoding="utf8") as file:
        json_data = json.loads(file.read())
        return json_data


def write_json(data, file_path: str, indent: int = 2):
    """write json; "-" writes stdout"""
    text = json.dumps(make_json_serializable(data), indent=indent)
    if file_path == "-":
        sys.stdout.write(text + "\n")
        return
    with open(file_path, "w", encoding="utf8") as file:
        file.write(text)
