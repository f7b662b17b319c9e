#include "smip/fetch.hpp"

#include "smip/csv.hpp"

#include <curl/curl.h>
#include <openssl/evp.h>
#include <zlib.h>

#include <cstdint>
#include <cstring>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace smip {

namespace {

std::size_t write_cb(char* ptr, std::size_t size, std::size_t nmemb, void* userdata)
{
    static_cast<std::string*>(userdata)->append(ptr, size * nmemb);
    return size * nmemb;
}

std::uint32_t le32(const std::string& s, std::size_t off)
{
    if (off + 4 > s.size())
        throw std::runtime_error("zip: truncated archive");
    std::uint32_t v = 0;
    for (int k = 3; k >= 0; --k)
        v = (v << 8) | static_cast<unsigned char>(s[off + k]);
    return v;
}

std::uint16_t le16(const std::string& s, std::size_t off)
{
    if (off + 2 > s.size())
        throw std::runtime_error("zip: truncated archive");
    return static_cast<std::uint16_t>(static_cast<unsigned char>(s[off]) |
                                      (static_cast<unsigned char>(s[off + 1]) << 8));
}

std::string inflate_raw(const char* data, std::size_t len, std::size_t expected)
{
    std::string out(expected, '\0');
    z_stream zs{};
    if (inflateInit2(&zs, -MAX_WBITS) != Z_OK)
        throw std::runtime_error("zip: inflateInit2 failed");
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data));
    zs.avail_in = static_cast<uInt>(len);
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    const int rc = inflate(&zs, Z_FINISH);
    inflateEnd(&zs);
    if (rc != Z_STREAM_END || zs.total_out != expected)
        throw std::runtime_error("zip: inflate failed");
    return out;
}

std::vector<std::string> split_tabs(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == '\t') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

std::string sanitize(std::string s)
{
    for (auto& ch : s)
        if (ch == ' ' || ch == ',' || ch == '"')
            ch = '_';
    return s;
}

} // namespace

std::string http_get(const std::string& url)
{
    static const bool init = [] { return curl_global_init(CURL_GLOBAL_DEFAULT) == CURLE_OK; }();
    if (!init)
        throw std::runtime_error("curl_global_init failed");
    std::unique_ptr<CURL, decltype(&curl_easy_cleanup)> h(curl_easy_init(), &curl_easy_cleanup);
    if (!h)
        throw std::runtime_error("curl_easy_init failed");
    std::string body;
    curl_easy_setopt(h.get(), CURLOPT_URL, url.c_str());
    curl_easy_setopt(h.get(), CURLOPT_FOLLOWLOCATION, 1L);
    curl_easy_setopt(h.get(), CURLOPT_FAILONERROR, 1L);
    curl_easy_setopt(h.get(), CURLOPT_WRITEFUNCTION, write_cb);
    curl_easy_setopt(h.get(), CURLOPT_WRITEDATA, &body);
    curl_easy_setopt(h.get(), CURLOPT_CONNECTTIMEOUT, 30L);
    const CURLcode rc = curl_easy_perform(h.get());
    if (rc != CURLE_OK)
        throw std::runtime_error("download of " + url + " failed: " + curl_easy_strerror(rc));
    return body;
}

std::string sha256_hex(std::string_view data)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

std::string zip_member(const std::string& archive, const std::string& member)
{
    if (archive.size() < 22)
        throw std::runtime_error("zip: archive too small");
    std::size_t eocd = std::string::npos;
    for (std::size_t p = archive.size() - 22 + 1; p-- > 0;) {
        if (le32(archive, p) == 0x06054b50) {
            eocd = p;
            break;
        }
        if (archive.size() - p > 22 + 65535)
            break;
    }
    if (eocd == std::string::npos)
        throw std::runtime_error("zip: end of central directory not found");
    const std::size_t entries = le16(archive, eocd + 10);
    std::size_t p = le32(archive, eocd + 16);
    for (std::size_t e = 0; e < entries; ++e) {
        if (le32(archive, p) != 0x02014b50)
            throw std::runtime_error("zip: bad central directory entry");
        const std::uint16_t method = le16(archive, p + 10);
        const std::uint32_t csize = le32(archive, p + 20);
        const std::uint32_t usize = le32(archive, p + 24);
        const std::uint16_t nlen = le16(archive, p + 28);
        const std::uint16_t xlen = le16(archive, p + 30);
        const std::uint16_t clen = le16(archive, p + 32);
        const std::uint32_t local = le32(archive, p + 42);
        const std::string name = archive.substr(p + 46, nlen);
        p += 46 + nlen + xlen + clen;
        if (name != member)
            continue;
        if (le32(archive, local) != 0x04034b50)
            throw std::runtime_error("zip: bad local header for " + member);
        const std::size_t data = local + 30 + le16(archive, local + 26) + le16(archive, local + 28);
        if (data + csize > archive.size())
            throw std::runtime_error("zip: member " + member + " runs past the archive");
        if (method == 0)
            return archive.substr(data, csize);
        if (method == 8)
            return inflate_raw(archive.data() + data, csize, usize);
        throw std::runtime_error("zip: unsupported compression method " + std::to_string(method));
    }
    throw std::runtime_error("zip: member " + member + " not found");
}

ConvertedTable convert_keel(const std::string& text, const std::string& positive_label, bool categorical)
{
    std::istringstream in(text);
    std::string line;
    std::vector<CsvRow> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '@')
            continue;
        std::istringstream ls(line);
        auto parsed = parse_csv(ls);
        if (!parsed.empty())
            rows.push_back(parsed.front());
    }
    if (rows.empty())
        throw std::runtime_error("convert_keel: no data rows");
    const std::size_t ncol = rows.front().size();
    ConvertedTable out;
    out.schema.label_column = "class";
    out.schema.positive_label = positive_label;
    CsvRow header;
    for (std::size_t c = 0; c + 1 < ncol; ++c) {
        header.push_back("f" + std::to_string(c + 1));
        if (categorical)
            out.schema.columns.emplace_back(header.back(), ColumnType::Categorical);
    }
    header.push_back("class");
    std::ostringstream os;
    os << join_csv(header) << '\n';
    for (const auto& r : rows) {
        if (r.size() != ncol)
            throw std::runtime_error("convert_keel: ragged row");
        os << join_csv(r) << '\n';
    }
    out.csv = os.str();
    return out;
}

ConvertedTable convert_orange_tab(const std::string& text, const std::string& positive_label)
{
    std::istringstream in(text);
    std::string line;
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        rows.push_back(split_tabs(line));
    }
    while (!rows.empty() && rows.back().size() == 1 && rows.back()[0].empty())
        rows.pop_back();
    if (rows.size() < 4)
        throw std::runtime_error("convert_orange_tab: missing header rows");
    const auto& names = rows[0];
    const auto& types = rows[1];
    auto flags = rows[2];
    flags.resize(names.size());
    ConvertedTable out;
    CsvRow header;
    std::optional<std::size_t> cls;
    for (std::size_t c = 0; c < names.size(); ++c) {
        header.push_back(sanitize(names[c]));
        if (flags[c] == "class") {
            cls = c;
            continue;
        }
        const std::string t = c < types.size() ? types[c] : "";
        if (t != "c" && t != "continuous")
            out.schema.columns.emplace_back(header.back(), ColumnType::Categorical);
    }
    if (!cls)
        throw std::runtime_error("convert_orange_tab: no class column");
    out.schema.label_column = header[*cls];
    out.schema.positive_label = positive_label;
    out.schema.missing = {"?", ""};
    std::ostringstream os;
    os << join_csv(header) << '\n';
    for (std::size_t r = 3; r < rows.size(); ++r) {
        auto row = rows[r];
        if (row.size() != names.size())
            throw std::runtime_error("convert_orange_tab: ragged row " + std::to_string(r));
        for (auto& f : row)
            if (f.empty())
                f = "?";
        os << join_csv(row) << '\n';
    }
    out.csv = os.str();
    return out;
}

std::vector<std::filesystem::path> fetch_uci(const std::filesystem::path& manifest,
                                             const std::filesystem::path& out_dir, const Downloader& get)
{
    const auto j = nlohmann::json::parse(read_file(manifest));
    std::map<std::string, std::string> archives;
    std::vector<std::filesystem::path> written;
    for (const auto& d : j.at("datasets")) {
        const auto name = d.at("name").get<std::string>();
        const auto archive_key = d.at("archive").get<std::string>();
        if (!archives.count(archive_key)) {
            const auto& a = j.at("archives").at(archive_key);
            auto bytes = get(a.at("url").get<std::string>());
            const auto digest = sha256_hex(bytes);
            if (digest != a.at("sha256").get<std::string>())
                throw std::runtime_error("archive " + archive_key + ": sha256 " + digest + " does not match manifest");
            archives.emplace(archive_key, std::move(bytes));
        }
        const auto raw = zip_member(archives.at(archive_key), d.at("member").get<std::string>());
        const auto digest = sha256_hex(raw);
        if (digest != d.at("sha256").get<std::string>())
            throw std::runtime_error(name + ": member sha256 " + digest + " does not match manifest");
        const auto format = d.at("format").get<std::string>();
        const auto positive = d.at("positive_label").get<std::string>();
        ConvertedTable t;
        if (format == "keel")
            t = convert_keel(raw, positive, d.value("categorical", false));
        else if (format == "orange_tab")
            t = convert_orange_tab(raw, positive);
        else
            throw std::runtime_error(name + ": unknown format " + format);
        const auto csv_path = out_dir / (name + ".csv");
        write_file_atomic(csv_path, t.csv);
        write_file_atomic(out_dir / (name + ".schema.json"), t.schema.to_json().dump(2) + "\n");
        written.push_back(csv_path);
    }
    return written;
}

} // namespace smip
