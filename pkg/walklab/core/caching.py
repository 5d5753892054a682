from functools import wraps
from typing import Dict, Any, Callable

_cache: Dict[str, Any] = {}
_stats = {"hits": 0, "misses": 0}

DEFAULT_MAX_ENTRIES = 256


def cache_result(max_entries: int = DEFAULT_MAX_ENTRIES) -> Callable:
    """
    Decorator memoizing a pure function on the repr of its arguments.

    Only use it for exact, deterministic computations whose arguments have a
    faithful repr (frozen dataclasses, numbers, strings, tuples). Cached
    values are shared, so callers must treat them as read-only.

    Args:
        max_entries: entries kept per function before the oldest are evicted
    """
    def decorator(func: Callable) -> Callable:
        prefix = f"{func.__module__}.{func.__name__}:"

        @wraps(func)
        def wrapper(*args, **kwargs):
            cache_key = f"{prefix}{args!r}:{sorted(kwargs.items())!r}"
            if cache_key in _cache:
                _stats["hits"] += 1
                return _cache[cache_key]

            _stats["misses"] += 1
            result = func(*args, **kwargs)

            owned = [key for key in _cache if key.startswith(prefix)]
            for key in owned[: max(0, len(owned) - max_entries + 1)]:
                del _cache[key]
            _cache[cache_key] = result
            return result
        return wrapper
    return decorator


def clear_cache(prefix: str = "") -> int:
    """
    Drop cached entries whose key starts with prefix (all entries by default).

    Returns:
        Number of entries removed
    """
    keys_to_remove = [key for key in _cache if key.startswith(prefix)]
    for key in keys_to_remove:
        del _cache[key]
    return len(keys_to_remove)


def get_cache_stats() -> Dict[str, Any]:
    total = _stats["hits"] + _stats["misses"]
    return {
        "total_entries": len(_cache),
        "hits": _stats["hits"],
        "misses": _stats["misses"],
        "hit_rate": _stats["hits"] / total if total else 0.0,
    }
