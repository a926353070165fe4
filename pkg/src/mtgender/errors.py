class InputError(ValueError):
    """Invalid user-supplied input: malformed files, inconsistent counts, bad arguments."""
