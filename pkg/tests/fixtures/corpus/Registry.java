package fixture.corpus;

import java.util.ArrayList;
import java.util.HashMap;
import java.util.List;
import java.util.Map;

/**
 * A small keyed store exercising generics, lambdas, and method references.
 */
public class Registry<K, V> {

    private final Map<K, V> entries = new HashMap<>();
    private final List<Listener<K>> listeners = new ArrayList<>();

    interface Listener<K> {
        void onChange(K key);
    }

    public void put(K key, V value) {
        entries.put(key, value);
        notifyAll(key);
    }

    public V getOrDefault(K key, V fallback) {
        V found = entries.get(key);
        return found != null ? found : fallback;
    }

    public boolean remove(K key) {
        boolean existed = entries.remove(key) != null;
        if (existed) {
            notifyAll(key);
        }
        return existed;
    }

    private void notifyAll(K key) {
        for (Listener<K> listener : listeners) {
            listener.onChange(key);
        }
    }

    public void subscribe(Listener<K> listener) {
        listeners.add(listener);
    }

    public List<K> keysMatching(java.util.function.Predicate<K> test) {
        List<K> matched = new ArrayList<>();
        for (K key : entries.keySet()) {
            if (test.test(key)) {
                matched.add(key);
            }
        }
        return matched;
    }

    public int size() {
        return entries.size();
    }

    public void clear() {
        List<K> keys = new ArrayList<>(entries.keySet());
        entries.clear();
        keys.forEach(this::notifyAll);
    }

    public static <T extends Comparable<T>> T max(List<T> values) {
        T best = values.get(0);
        for (T candidate : values) {
            if (candidate.compareTo(best) > 0) {
                best = candidate;
            }
        }
        return best;
    }

    public Map<K, V> snapshot() {
        return new HashMap<>(entries);
    }

    public void replaceAll(java.util.function.BiFunction<K, V, V> mapper) {
        entries.replaceAll((k, v) -> mapper.apply(k, v));
    }

    public V computeIfAbsent(K key, java.util.function.Function<K, V> maker) {
        V existing = entries.get(key);
        if (existing == null) {
            existing = maker.apply(key);
            entries.put(key, existing);
        }
        return existing;
    }
}
