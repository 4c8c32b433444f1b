"""
Input and output path checks for the command-line front end.
"""

import os
import re
import logging
from typing import Tuple

from settings import ALLOWED_INPUT_EXTENSIONS, MAX_FILENAME_LENGTH, MAX_INPUT_SIZE_MB


class FileGuards:
    """Utility class for file-handling checks."""

    @staticmethod
    def validate_input_path(path: str) -> Tuple[bool, str]:
        """
        Validate an instance or plan file before reading it.

        Args:
            path: Path given on the command line

        Returns:
            tuple: (is_valid: bool, message: str)
        """
        if not path:
            return False, "Input path is required"

        filename = os.path.basename(path)
        if len(filename) > MAX_FILENAME_LENGTH:
            return False, f"Filename too long (max {MAX_FILENAME_LENGTH} characters)"

        extension = os.path.splitext(filename)[1].lower()
        if extension not in ALLOWED_INPUT_EXTENSIONS:
            allowed = ', '.join(sorted(ALLOWED_INPUT_EXTENSIONS))
            return False, f"File type not allowed. Allowed: {allowed}"

        if not os.path.isfile(path):
            return False, f"File not found: {filename}"

        size = os.path.getsize(path)
        if size == 0:
            return False, "Input file is empty"
        if size > MAX_INPUT_SIZE_MB * 1024 * 1024:
            return False, f"File too large. Maximum size: {MAX_INPUT_SIZE_MB}MB"

        return True, "Valid"

    @staticmethod
    def sanitize_output_stem(name: str) -> str:
        """
        Turn an input filename into a safe stem for artifact names.

        Args:
            name: Original filename or path

        Returns:
            str: Stem containing only letters, digits, '-', '_' and '.'
        """
        stem = os.path.splitext(os.path.basename(name))[0]
        stem = re.sub(r'[^A-Za-z0-9_.\-]', '_', stem)
        stem = stem.replace('..', '_').strip('.')
        return stem[:MAX_FILENAME_LENGTH - 16] or "instance"

    @staticmethod
    def log_event(event_type: str, details: str, level: str = 'WARNING'):
        """
        Log a file-handling event.

        Args:
            event_type: Short upper-case event name
            details: Event details
            level: Log level name (INFO, WARNING, ERROR)
        """
        logger = logging.getLogger('compactlin.files')
        message = f"FILE_EVENT: {event_type} - {details}"
        logger.log(getattr(logging, level, logging.WARNING), message)
