import logging
from pathlib import Path
from typing import Union

import yaml
from pydantic import ValidationError

from core.exceptions import ConfigurationError
from models.rule_model import Rule, RuleSet
from services.contextualizer_service import RuleEngine

logger = logging.getLogger(__name__)


def _first_error(e: ValidationError) -> str:
    error = e.errors()[0]
    where = ".".join(str(part) for part in error["loc"])
    message = error["msg"].removeprefix("Value error, ")
    return f"{where}: {message}" if where else message


def load_rules(path: Union[str, Path]) -> RuleSet:
    """Load a YAML rules file: a list of rules, or a mapping with a ``rules`` list.

    Rule order is the file order. Any invalid rule fails the whole load with
    a ConfigurationError naming the rule's index.
    """
    path = Path(path)
    with path.open("r", encoding="utf-8") as f:
        try:
            document = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigurationError(f"{path}: malformed YAML: {e}")

    if document is None:
        raw_rules = []
    elif isinstance(document, dict):
        raw_rules = document.get("rules") or []
    else:
        raw_rules = document
    if not isinstance(raw_rules, list):
        raise ConfigurationError(f"{path}: expected a list of rules")

    rules = []
    for index, raw in enumerate(raw_rules):
        if not isinstance(raw, dict):
            raise ConfigurationError(f"expected a mapping, got {type(raw).__name__}", rule_index=index)
        try:
            rules.append(Rule.model_validate(raw))
        except ValidationError as e:
            raise ConfigurationError(_first_error(e), rule_index=index)

    rule_set = RuleSet(rules=tuple(rules))
    RuleEngine(rule_set)  # compiles every pattern, raising with the rule index
    logger.info(f"Loaded {len(rule_set)} rules from {path}")
    return rule_set
