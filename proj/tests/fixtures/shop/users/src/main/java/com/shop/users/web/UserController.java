package com.shop.users.web;

import java.util.List;
import org.springframework.web.bind.annotation.*;
import com.shop.users.domain.User;
import com.shop.users.service.UserService;

@RestController
@RequestMapping("/api/users")
public class UserController {
    private final UserService userService;

    public UserController(UserService userService) {
        this.userService = userService;
    }

    @GetMapping("/{id}")
    public User getUser(@PathVariable Long id) {
        return userService.find(id);
    }

    @GetMapping
    public List<User> listUsers() {
        return userService.all();
    }

    @PostMapping
    public User createUser(@RequestBody User user) {
        return userService.save(user);
    }

    @PutMapping("/{id}")
    public User updateUser(@PathVariable Long id, @RequestBody User user) {
        return userService.update(id, user);
    }

    // Two spellings of the same lookup; clients use both.
    @RequestMapping(value = {"/lookup/email/{email}", "/lookup/mail/{email}"}, method = RequestMethod.GET)
    public User findByEmail(@PathVariable("email") String email) {
        return userService.byEmail(email);
    }
}
