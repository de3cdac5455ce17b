"""External recommendation service client.

The service is strictly advisory: it can only choose among the three
architectures. Request and response travel as JSON; the response must be
a document with a single ``architecture`` field naming one of
``centralized | hierarchical | holonic`` (case-insensitive, surrounding
whitespace ignored). Anything else is treated as a schema violation by
the caller and answered from the rule table instead.

Configuration comes from the environment:

* ``DECISION_BACKEND_URL``         endpoint to POST to (required)
* ``DECISION_BACKEND_KEY``         bearer token, optional
* ``DECISION_BACKEND_TIMEOUT_MS``  request timeout, default 5000
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import requests

from .decision import MissionContext, context_document, recommend

DEFAULT_TIMEOUT_MS = 5000

INSTRUCTION_TEXT = (
    "Select the single most suitable drone swarm control architecture for "
    "the given mission context. Reply with a JSON document containing one "
    'field "architecture" whose value is exactly one of: centralized, '
    "hierarchical, holonic."
)


class BackendNotConfigured(RuntimeError):
    """Raised when the external backend is requested without a URL."""


@dataclass
class ExternalModelBackend:
    """HTTP decision backend; raises on transport failure or bad payload."""

    url: str
    api_key: str | None = None
    timeout_ms: int = DEFAULT_TIMEOUT_MS

    @classmethod
    def from_env(cls) -> "ExternalModelBackend":
        url = os.environ.get("DECISION_BACKEND_URL", "").strip()
        if not url:
            raise BackendNotConfigured(
                "DECISION_BACKEND_URL is not set; external backend unavailable"
            )
        timeout_ms = int(os.environ.get("DECISION_BACKEND_TIMEOUT_MS", DEFAULT_TIMEOUT_MS))
        return cls(
            url=url,
            api_key=os.environ.get("DECISION_BACKEND_KEY") or None,
            timeout_ms=timeout_ms,
        )

    def propose(self, ctx: MissionContext) -> str:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        response = requests.post(
            self.url,
            json={"instruction": INSTRUCTION_TEXT, "context": context_document(ctx)},
            headers=headers,
            timeout=self.timeout_ms / 1000.0,
        )
        response.raise_for_status()
        payload = response.json()
        if not isinstance(payload, dict) or "architecture" not in payload:
            raise ValueError("response document lacks an 'architecture' field")
        return str(payload["architecture"])


class RuleTableBackend:
    """In-process backend that answers straight from the rule table."""

    def propose(self, ctx: MissionContext) -> str:
        return recommend(ctx).architecture.value
