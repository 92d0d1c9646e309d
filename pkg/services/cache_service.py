"""
Simple in-memory caching service for repeated speed-limit evaluations
"""
import logging
from collections import OrderedDict
from threading import Lock
from typing import Any, Optional

logger = logging.getLogger(__name__)

DEFAULT_MAX_ENTRIES = 50000


class SimpleCache:
    """
    Thread-safe in-memory cache bounded to max_entries; the least recently
    used entry is evicted first
    """

    def __init__(self, max_entries: int = DEFAULT_MAX_ENTRIES):
        self._cache: 'OrderedDict[str, Any]' = OrderedDict()
        self._lock = Lock()
        self.max_entries = max_entries
        self.hits = 0
        self.misses = 0
        self.evictions = 0

    def get(self, key: str) -> Optional[Any]:
        """
        Get value from cache if it exists

        Args:
            key: Cache key

        Returns:
            Cached value or None if not found
        """
        with self._lock:
            if key in self._cache:
                self._cache.move_to_end(key)
                self.hits += 1
                return self._cache[key]
            self.misses += 1
            return None

    def set(self, key: str, value: Any) -> None:
        """
        Set value in cache

        Args:
            key: Cache key
            value: Value to cache
        """
        with self._lock:
            self._cache[key] = value
            self._cache.move_to_end(key)
            while len(self._cache) > self.max_entries:
                self._cache.popitem(last=False)
                self.evictions += 1

    def delete_prefix(self, prefix: str) -> int:
        """
        Remove every entry whose key starts with prefix

        Returns:
            Number of entries removed
        """
        with self._lock:
            keys = [key for key in self._cache if key.startswith(prefix)]
            for key in keys:
                del self._cache[key]
        return len(keys)

    def clear(self) -> None:
        """Clear all cache entries"""
        with self._lock:
            self._cache.clear()
            self.hits = 0
            self.misses = 0
            self.evictions = 0

    def size(self) -> int:
        """Get current cache size"""
        with self._lock:
            return len(self._cache)


# Global cache instance
_cache_instance = SimpleCache()


def get_cache() -> SimpleCache:
    """Get the global cache instance"""
    return _cache_instance


def ratio_key(family: str, mu: float, alpha: float, endpoint: float, settings: Any = None) -> str:
    """
    Standardized key; floats are written with repr so distinct values never collide.
    settings identifies the quadrature settings the value was computed with.
    """
    return f"ratio:{family}:{mu!r}:{alpha!r}:{endpoint!r}:{settings!r}"


def cache_ratio(family: str, mu: float, alpha: float, endpoint: float, result: Any, settings: Any = None) -> None:
    get_cache().set(ratio_key(family, mu, alpha, endpoint, settings), result)


def get_cached_ratio(family: str, mu: float, alpha: float, endpoint: float, settings: Any = None) -> Optional[Any]:
    """
    Get a cached pure-bound result

    Returns:
        Cached QsltResult or None if not found
    """
    return get_cache().get(ratio_key(family, mu, alpha, endpoint, settings))


def invalidate_ratio_cache(family: Optional[str] = None) -> None:
    """
    Invalidate cached ratios

    Args:
        family: If provided, only invalidate entries of this channel family
    """
    removed = get_cache().delete_prefix(f"ratio:{family}:" if family else "ratio:")
    if removed:
        logger.debug(f"Invalidated {removed} cached ratios")


def log_cache_stats() -> None:
    """Log cache statistics for monitoring"""
    cache = get_cache()
    logger.info(f"Cache stats - Size: {cache.size()}, Hits: {cache.hits}, Misses: {cache.misses}, "
                f"Evicted: {cache.evictions}")
