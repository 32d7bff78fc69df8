#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "orbit5gc/nas.hpp"
#include "orbit5gc/result.hpp"
#include "orbit5gc/upf.hpp"

namespace orbit5gc {

enum class SmfError {
    Ok = 0,
    UnknownDataNetwork,
    PoolExhausted,
    UnknownSession,
};
const char* smf_error_name(SmfError e);

enum class SessionState { Activating, Active, Released };
inline const char* session_state_name(SessionState s) {
    switch (s) {
        case SessionState::Activating: return "Activating";
        case SessionState::Active: return "Active";
        case SessionState::Released: return "Released";
    }
    return "?";
}

struct PduSession {
    std::uint32_t session_id = 0;
    nas::Supi supi;
    std::string dn_name;
    std::uint32_t ue_ip = 0;
    std::uint32_t tunnel_id = 0;
    std::uint8_t qos_class = 0;
    SessionState state = SessionState::Activating;
};

// Sequential allocator over a CIDR block. Skips the network address and
// the .1 gateway, never hands out the broadcast address, reuses returned
// addresses LIFO before advancing the sequential cursor.
class IpPool {
public:
    explicit IpPool(Ipv4Cidr cidr);

    Result<std::uint32_t, SmfError> allocate();
    void release(std::uint32_t addr);

    std::size_t allocated_count() const { return allocated_; }
    std::size_t free_list_size() const { return free_list_.size(); }
    std::size_t capacity() const;  // usable addresses in the block
    // addresses never handed out yet (sequential cursor to pool end)
    std::size_t fresh_remaining() const {
        return next_ > last_usable_ ? 0 : last_usable_ - next_ + 1;
    }
    const Ipv4Cidr& cidr() const { return cidr_; }

private:
    Ipv4Cidr cidr_;
    std::uint32_t first_usable_;
    std::uint32_t last_usable_;
    std::uint32_t next_;
    std::vector<std::uint32_t> free_list_;
    std::size_t allocated_ = 0;
};

struct DataNetworkConfig {
    std::string name;
    DnTarget target = DnTarget::Ground;
    bool echo = false;  // DN bounces received packets back to the sender
};

struct SessionAccept {
    std::uint32_t session_id = 0;
    std::uint32_t ue_ip = 0;
    std::uint8_t qos_class = 0;
    std::uint32_t tunnel_id = 0;
};

// Session management: address allocation, PDU session table, N4 rule
// programming toward the UPF.
class Smf {
public:
    Smf(Simulator& sim, Tracer& tracer, std::vector<DataNetworkConfig> dns, IpPool pool, Upf& upf);

    // Idempotent per (supi, dn): repeating the request returns the
    // existing session's parameters.
    Result<SessionAccept, SmfError> establish_session(const nas::Supi& supi, const std::string& dn_name,
                                                      std::uint8_t qos_class);
    Result<PduSession, SmfError> release_session(std::uint32_t session_id);
    // Releases every session of the subscriber; returns released ids.
    std::vector<std::uint32_t> release_all(const nas::Supi& supi);

    std::size_t active_session_count() const;
    std::vector<std::uint32_t> active_session_ids() const;
    const std::map<std::uint32_t, PduSession>& sessions() const { return sessions_; }
    const IpPool& pool() const { return pool_; }
    const std::vector<DataNetworkConfig>& data_networks() const { return dns_; }
    const DataNetworkConfig* find_dn(const std::string& name) const;

private:
    void trace_session(const PduSession& s);

    Simulator& sim_;
    Tracer& tracer_;
    std::vector<DataNetworkConfig> dns_;
    IpPool pool_;
    Upf& upf_;
    std::map<std::uint32_t, PduSession> sessions_;
    std::uint32_t next_session_id_ = 1;
    std::uint32_t next_tunnel_id_ = 0x1000;
};

}  // namespace orbit5gc
