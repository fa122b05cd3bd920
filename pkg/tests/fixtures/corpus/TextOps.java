package fixture.corpus;

/** String handling with a bias toward escape-heavy literals. */
public class TextOps {

    private static final String EMPTY = "";

    public String trimToNull(String raw) {
        if (raw == null) {
            return null;
        }
        String trimmed = raw.trim();
        return trimmed.isEmpty() ? null : trimmed;
    }

    public String quote(String value) {
        return "\"" + value.replace("\\", "\\\\").replace("\"", "\\\"") + "\"";
    }

    public String repeat(String part, int times) {
        StringBuilder out = new StringBuilder();
        for (int i = 0; i < times; i++) {
            out.append(part);
        }
        return out.toString();
    }

    public int countChar(String text, char needle) {
        int count = 0;
        for (int i = 0; i < text.length(); i++) {
            if (text.charAt(i) == needle) {
                count++;
            }
        }
        return count;
    }

    public String firstLine(String text) {
        int cut = text.indexOf('\n');
        return cut < 0 ? text : text.substring(0, cut);
    }

    public boolean isBlank(String text) {
        return text == null || text.trim().equals(EMPTY);
    }

    public String padLeft(String text, int width) {
        StringBuilder out = new StringBuilder(text);
        while (out.length() < width) {
            out.insert(0, ' ');
        }
        return out.toString();
    }

    public String join(String separator, String[] parts) {
        StringBuilder out = new StringBuilder();
        for (int i = 0; i < parts.length; i++) {
            if (i > 0) {
                out.append(separator);
            }
            out.append(parts[i]);
        }
        return out.toString();
    }

    public String ellipsize(String text, int max) {
        // Callers pass max >= 4; shorter budgets would clip the dots.
        if (text.length() <= max) {
            return text;
        }
        return text.substring(0, max - 3) + "...";
    }

    public static String normalizeNewlines(String text) {
        return text.replace("\r\n", "\n").replace('\r', '\n');
    }

    public char lastChar(String text) {
        return text.charAt(text.length() - 1);
    }

    private String tab() {
        return "\t";
    }
}
