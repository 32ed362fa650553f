"""
event_stream.py
===============
Run log: one JSON event per toolkit invocation, newest last.
Reports never carry timestamps; the run log does.
"""

import json
import logging
import os
from datetime import datetime
from typing import Dict, List

logger = logging.getLogger(__name__)

MAX_EVENTS = 1000


class RunLog:
    """JSON list of {timestamp, type, data} events"""

    def __init__(self, event_file="memory/run_log.json"):
        self.event_file = event_file
        directory = os.path.dirname(event_file)
        if directory:
            os.makedirs(directory, exist_ok=True)
        self.events = self._load_events()

    def _load_events(self) -> List[Dict]:
        """Load events from file - always a list"""
        if not os.path.exists(self.event_file):
            return []
        try:
            with open(self.event_file, 'r') as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError):
            logger.warning(f"⚠ Run log {self.event_file} unreadable, starting fresh")
            return []
        if isinstance(data, list):
            return data
        logger.warning("⚠ Run log has unexpected format, starting fresh")
        return []

    def add_event(self, event_type: str, data: Dict = None):
        self.events.append({
            "timestamp": datetime.now().isoformat(),
            "type": event_type,
            "data": data or {},
        })
        if len(self.events) > MAX_EVENTS:
            self.events = self.events[-MAX_EVENTS:]

    def save_events(self):
        try:
            with open(self.event_file, 'w') as f:
                json.dump(self.events, f, indent=2)
        except OSError as e:
            logger.warning(f"⚠ Failed to save run log: {e}")

    def record_command(self, argv: List[str], status: int, summary: Dict = None):
        """Append and persist one "command" event"""
        subcommand = argv[0] if argv else None
        self.add_event("command", {"subcommand": subcommand, "argv": list(argv),
                                   "exit_status": status, "summary": summary})
        self.save_events()

    def failures(self, limit: int = 10) -> List[Dict]:
        """Most recent command events with a nonzero exit status"""
        failed = [e for e in self.events
                  if e.get("type") == "command" and e.get("data", {}).get("exit_status")]
        return failed[-limit:]
