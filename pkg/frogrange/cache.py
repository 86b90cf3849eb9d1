"""Модуль кэширования таблиц frogrange."""

import logging
import threading
from collections import OrderedDict
from functools import wraps
from typing import Any, Callable, Dict, Hashable, List, Optional

logger = logging.getLogger(__name__)


class MemoryCache:
    """Потокобезопасный LRU-кэш в памяти."""

    def __init__(self, max_size: int = 256):
        self.cache: "OrderedDict[Hashable, Any]" = OrderedDict()
        self.max_size = max_size
        self._lock = threading.RLock()

    def get(self, key: Hashable) -> Optional[Any]:
        """Получает значение из кэша."""
        with self._lock:
            if key not in self.cache:
                return None
            self.cache.move_to_end(key)
            return self.cache[key]

    def set(self, key: Hashable, value: Any) -> None:
        """Сохраняет значение в кэш."""
        with self._lock:
            self.cache[key] = value
            self.cache.move_to_end(key)
            while len(self.cache) > self.max_size:
                self.cache.popitem(last=False)

    def delete(self, key: Hashable) -> bool:
        """Удаляет значение из кэша."""
        with self._lock:
            return self.cache.pop(key, None) is not None

    def clear(self) -> None:
        """Очищает весь кэш."""
        with self._lock:
            self.cache.clear()

    def size(self) -> int:
        """Возвращает размер кэша."""
        with self._lock:
            return len(self.cache)

    def keys(self) -> List[Hashable]:
        """Возвращает ключи кэша."""
        with self._lock:
            return list(self.cache.keys())


class CacheManager:
    """Менеджер кэширования со статистикой попаданий."""

    def __init__(self, max_size: int = 256):
        self.cache = MemoryCache(max_size=max_size)
        self._lock = threading.RLock()
        self.stats = {
            'hits': 0,
            'misses': 0,
            'sets': 0,
        }

    def get(self, key: Hashable) -> Optional[Any]:
        """Получает значение из кэша."""
        value = self.cache.get(key)
        with self._lock:
            if value is not None:
                self.stats['hits'] += 1
            else:
                self.stats['misses'] += 1
        return value

    def set(self, key: Hashable, value: Any) -> None:
        """Сохраняет значение в кэш."""
        self.cache.set(key, value)
        with self._lock:
            self.stats['sets'] += 1

    def get_or_compute(self, key: Hashable, factory: Callable[[], Any]) -> Any:
        """Возвращает значение из кэша или вычисляет и сохраняет его."""
        with self._lock:
            value = self.get(key)
            if value is None:
                logger.debug("Cache miss: %s", key)
                value = factory()
                self.set(key, value)
            return value

    def clear(self) -> None:
        """Очищает кэш и статистику."""
        self.cache.clear()
        with self._lock:
            for name in self.stats:
                self.stats[name] = 0

    def get_stats(self) -> Dict[str, Any]:
        """Статистика кэша."""
        with self._lock:
            total = self.stats['hits'] + self.stats['misses']
            return {
                **self.stats,
                'size': self.cache.size(),
                'hit_rate': self.stats['hits'] / total if total else 0.0,
            }


# Общий кэш таблиц ln(1 − ρ^j)
table_cache = CacheManager(max_size=16)


def cached_table(prefix: str, manager: Optional[CacheManager] = None) -> Callable:
    """Декоратор: кэширует функцию от хэшируемых аргументов."""
    def decorator(func: Callable) -> Callable:
        @wraps(func)
        def wrapper(*args):
            target = manager or table_cache
            return target.get_or_compute((prefix, *args), lambda: func(*args))
        return wrapper
    return decorator
