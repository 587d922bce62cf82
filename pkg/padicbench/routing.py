"""
Verb registry.

Verb modules declare a router and decorate one handler per verb, the way an
HTTP service declares routes; the workbench includes every router once at
startup. A handler receives the field of one job cell and its validated
request and returns a (outputs, certificates) pair of JSON-ready dicts.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple, Type

from pydantic import BaseModel

from padicbench.localfield import FieldSpec
from padicbench.schemas import Verb

logger = logging.getLogger(__name__)

CellResult = Tuple[dict, dict]
Handler = Callable[[FieldSpec, BaseModel], CellResult]


@dataclass(frozen=True)
class VerbRoute:
    verb: Verb
    handler: Handler
    request_model: Type[BaseModel]
    summary: str
    tags: Tuple[str, ...] = ()


@dataclass
class VerbRouter:
    tags: List[str] = field(default_factory=list)
    routes: List[VerbRoute] = field(default_factory=list)

    def verb(self, verb: Verb, request_model: Type[BaseModel]):
        """Register the decorated function as the handler of `verb`."""

        def decorator(handler: Handler) -> Handler:
            summary = (handler.__doc__ or "").strip().splitlines()[0] if handler.__doc__ else verb.value
            self.routes.append(VerbRoute(verb, handler, request_model, summary, tuple(self.tags)))
            return handler

        return decorator


class VerbTable:
    """The verbs included into the workbench, keyed by verb."""

    def __init__(self):
        self._routes: Dict[Verb, VerbRoute] = {}

    def include_router(self, router: VerbRouter) -> None:
        for route in router.routes:
            if route.verb in self._routes:
                raise ValueError(f"verb {route.verb.value} registered twice")
            self._routes[route.verb] = route
            logger.debug("registered verb %s (%s)", route.verb.value, ", ".join(route.tags))

    def get(self, verb: Verb) -> Optional[VerbRoute]:
        return self._routes.get(verb)

    def __iter__(self):
        return iter(self._routes.values())

    def __contains__(self, verb: Verb) -> bool:
        return verb in self._routes
