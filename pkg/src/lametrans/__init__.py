"""Lamé transmission problems with extreme-contrast inclusions."""
