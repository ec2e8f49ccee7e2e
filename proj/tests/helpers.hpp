#ifndef PPSCAN_TESTS_HELPERS_HPP
#define PPSCAN_TESTS_HELPERS_HPP

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <utility>

#include <unistd.h>

#include <httplib.h>

namespace helpers {

inline std::filesystem::path fixture_dir() { return PPSCAN_FIXTURE_DIR; }
inline std::filesystem::path data_dir() { return PPSCAN_DATA_DIR; }

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("test fixture missing: " + path.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline void spit(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << content;
}

// Fresh scratch directory per call; removed eagerly so a crashed previous run
// cannot leak state into this one.
inline std::filesystem::path temp_dir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    auto dir = std::filesystem::temp_directory_path() /
               ("ppscan_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter.fetch_add(1)));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// Localhost HTTP server on an ephemeral port. Handlers are registered by the
// setup callback before the listener starts, so routing is immutable while
// requests are in flight.
class StubServer {
public:
    template <typename Setup>
    explicit StubServer(Setup&& setup) {
        setup(server_);
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~StubServer() {
        server_.stop();
        if (thread_.joinable()) thread_.join();
    }

    int port() const { return port_; }
    std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }
    std::string url(const std::string& path) const { return base_url() + path; }

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

// Serves a fixture directory as static files (.html as text/html, .txt as
// text/plain); anything else 404s.
inline StubServer serve_directory(const std::filesystem::path& dir) {
    return StubServer([&](httplib::Server& s) { s.set_mount_point("/", dir.string()); });
}

// Writes the @BASE@-templated manifest next to the corpus scratch dir.
inline std::filesystem::path instantiate_manifest(const std::filesystem::path& template_path,
                                                  const std::string& base_url,
                                                  const std::filesystem::path& out_path) {
    std::string text = slurp(template_path);
    const std::string needle = "@BASE@";
    for (std::size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos)) {
        text.replace(pos, needle.size(), base_url);
        pos += base_url.size();
    }
    spit(out_path, text);
    return out_path;
}

}  // namespace helpers

#endif
