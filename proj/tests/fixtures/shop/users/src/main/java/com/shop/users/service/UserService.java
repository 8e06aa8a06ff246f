package com.shop.users.service;

import java.util.List;
import org.springframework.stereotype.Service;
import com.shop.users.domain.User;
import com.shop.users.repo.UserRepository;

@Service
public class UserService {
    private final UserRepository repository;

    public UserService(UserRepository repository) {
        this.repository = repository;
    }

    public User find(Long id) {
        return repository.findById(id).orElse(null);
    }

    public List<User> all() {
        return repository.findAll();
    }

    public User save(User user) {
        return repository.save(user);
    }

    public User update(Long id, User user) {
        User existing = find(id);
        return existing == null ? null : save(user);
    }

    public User byEmail(String email) {
        return repository.findByEmail(email).orElse(null);
    }
}
